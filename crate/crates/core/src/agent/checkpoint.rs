//! Checkpoint files.
//!
//! A checkpoint is a JSON object:
//!
//! ```json
//! {
//!   "version": 1,
//!   "env": { "n_methods": 20, "s_max": 10, "p_max": 3, "objective": "mq" },
//!   "train": { "episodes": 1500, "learning_rate": 0.0003, ... },
//!   "net": { "input": 220, "hidden": [128, 128], "actions": 10 },
//!   "params": [ ... ],
//!   "adam": { "lr": 0.0003, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8, "m": [ ... ], "v": [ ... ], "t": 6000 }
//! }
//! ```
//!
//! `params` is the flattened network: for each trunk layer, then the policy
//! head, then the value head, a row-major `output × input` weight matrix
//! followed by the bias vector.

use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::network::{NetSpec, PolicyNet};
use super::trainer::TrainConfig;
use super::AgentError;
use crate::env::EnvConfig;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub net: NetSpec,
    pub params: Vec<f64>,
    pub adam: Adam,
}

impl Checkpoint {
    pub fn new(env: EnvConfig, train: TrainConfig, net: &PolicyNet, adam: &Adam) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            env,
            train,
            net: net.spec().clone(),
            params: net.params().to_vec(),
            adam: adam.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, AgentError> {
        let cp: Self = serde_json::from_str(text).map_err(|e| AgentError::Checkpoint(e.to_string()))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(AgentError::Checkpoint(format!("unsupported version {}", cp.version)));
        }
        let n = cp.net.param_count();
        if cp.params.len() != n || cp.adam.m.len() != n || cp.adam.v.len() != n {
            return Err(AgentError::Checkpoint(format!("expected {n} parameters")));
        }
        Ok(cp)
    }

    pub fn restore(&self) -> Result<(PolicyNet, Adam), AgentError> {
        let net = PolicyNet::from_parts(self.net.clone(), self.params.clone())
            .ok_or_else(|| AgentError::Checkpoint("parameter count does not match network".into()))?;
        Ok((net, self.adam.clone()))
    }
}
