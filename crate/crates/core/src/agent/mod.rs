//! Proximal policy optimization over the service-assignment environment.

mod adam;
mod checkpoint;
mod network;
mod ppo;
mod rollout;
mod trainer;

pub use adam::{clip_grad_norm, Adam};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use network::{log_softmax, softmax, Features, ForwardPass, NetSpec, PolicyNet};
pub use ppo::{ppo_loss, ppo_update, select_action, ActionChoice, LossStats, PpoParams};
pub use rollout::{compute_gae, normalize, RolloutBuffer};
pub use trainer::{greedy_rollout, train, train_with, training_log_tsv, EpisodeLog, TrainConfig, TrainOutcome};

use thiserror::Error;

use crate::env::EnvError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("observation has length {actual}, network expects {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("rollout buffer is empty")]
    EmptyBuffer,
    #[error("non-finite loss in update {update}: {detail}")]
    NonFiniteLoss { update: usize, detail: String },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}
