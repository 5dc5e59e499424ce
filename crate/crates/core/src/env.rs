//! Service-assignment environment.
//!
//! The state is an `N × s_max` one-hot matrix: row `m` marks the service of
//! method `m`. Every episode starts with all methods in service 0 and visits
//! the methods in order, `p_max` times over, so it lasts exactly
//! `T = N × p_max` steps. At each step the agent picks a service for the
//! method under the cursor and is rewarded with `J − J_best`, the objective
//! of the new decomposition minus the best objective seen so far in the
//! episode (the initial state included).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::CallGraph;
use crate::metrics::{abcp, bcp, di, mq, Decomposition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("environment configured for {expected} methods, graph has {actual}")]
    GraphEnvMismatch { expected: usize, actual: usize },
    #[error("action {action} outside 0..{s_max}")]
    ActionOutOfRange { action: usize, s_max: usize },
    #[error("step called after the episode finished")]
    StepAfterDone,
    #[error("invalid environment config: {0}")]
    InvalidConfig(String),
    #[error("invalid objective {0:?}: expected mq, abcp or weighted:<w> with w in [0, 1]")]
    BadObjective(String),
}

/// What the environment rewards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// MQ on its native `[−1, 1]` scale.
    Mq,
    /// ABCP rescaled to `[0, 1]`.
    Abcp,
    /// `w · (MQ + 1)/2 + (1 − w) · ABCP/100`.
    Weighted(f64),
}

impl Objective {
    pub fn weighted(w: f64) -> Result<Self, EnvError> {
        if (0.0..=1.0).contains(&w) {
            Ok(Self::Weighted(w))
        } else {
            Err(EnvError::BadObjective(format!("weighted:{w}")))
        }
    }
}

impl FromStr for Objective {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, EnvError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mq" => Ok(Self::Mq),
            "abcp" => Ok(Self::Abcp),
            other => {
                let w = other
                    .strip_prefix("weighted:")
                    .and_then(|w| w.parse::<f64>().ok())
                    .ok_or_else(|| EnvError::BadObjective(s.to_string()))?;
                Self::weighted(w).map_err(|_| EnvError::BadObjective(s.to_string()))
            }
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mq => f.write_str("mq"),
            Self::Abcp => f.write_str("abcp"),
            Self::Weighted(w) => write!(f, "weighted:{w}"),
        }
    }
}

/// Objective value of a decomposition.
pub fn objective_value(g: &CallGraph, d: &Decomposition, objective: Objective) -> f64 {
    match objective {
        Objective::Mq => mq(g, d),
        Objective::Abcp => abcp(bcp(g, d), di(g, d)) / 100.0,
        Objective::Weighted(w) => w * (mq(g, d) + 1.0) / 2.0 + (1.0 - w) * abcp(bcp(g, d), di(g, d)) / 100.0,
    }
}

/// Upper bound on the number of services: `⌈N/2⌉`, at least 1.
pub fn max_services(n_methods: usize) -> usize {
    n_methods.div_ceil(2).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub n_methods: usize,
    pub s_max: usize,
    pub p_max: usize,
    pub objective: Objective,
}

impl EnvConfig {
    pub fn new(n_methods: usize, p_max: usize, objective: Objective) -> Result<Self, EnvError> {
        if n_methods == 0 {
            return Err(EnvError::InvalidConfig("graph has no methods".into()));
        }
        if p_max == 0 {
            return Err(EnvError::InvalidConfig("p_max must be at least 1".into()));
        }
        if let Objective::Weighted(w) = objective {
            Objective::weighted(w)?;
        }
        Ok(Self {
            n_methods,
            s_max: max_services(n_methods),
            p_max,
            objective,
        })
    }

    /// `T = N × p_max`.
    pub fn episode_len(&self) -> usize {
        self.n_methods * self.p_max
    }

    /// Flattened assignment matrix followed by the one-hot cursor.
    pub fn observation_len(&self) -> usize {
        self.n_methods * self.s_max + self.n_methods
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    /// Service column of each method; the one-hot matrix in compact form.
    pub assignment: Vec<usize>,
    pub cursor: usize,
    pub pass: usize,
    pub steps: usize,
    pub obj_best: f64,
    pub best_assignment: Vec<usize>,
    pub done: bool,
}

impl EnvState {
    /// Row-major `N × s_max` one-hot matrix.
    pub fn assignment_matrix(&self, s_max: usize) -> Vec<Vec<u8>> {
        self.assignment
            .iter()
            .map(|&s| (0..s_max).map(|c| u8::from(c == s)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Objective of the decomposition after this step.
    pub objective: f64,
    /// Non-empty services after this step.
    pub services: usize,
    /// Method that was just assigned.
    pub method: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

pub struct ServiceEnv<'g> {
    graph: &'g CallGraph,
    cfg: EnvConfig,
    state: EnvState,
}

impl<'g> ServiceEnv<'g> {
    /// Creates the environment in its reset state.
    pub fn new(cfg: EnvConfig, graph: &'g CallGraph) -> Result<Self, EnvError> {
        if cfg.n_methods != graph.len() {
            return Err(EnvError::GraphEnvMismatch { expected: cfg.n_methods, actual: graph.len() });
        }
        let initial = vec![0; cfg.n_methods];
        let obj = objective_value(graph, &Decomposition::new(initial.clone()), cfg.objective);
        let state = EnvState {
            assignment: initial.clone(),
            cursor: 0,
            pass: 0,
            steps: 0,
            obj_best: obj,
            best_assignment: initial,
            done: false,
        };
        Ok(Self { graph, cfg, state })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn graph(&self) -> &'g CallGraph {
        self.graph
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    /// Back to the single-service state; returns the first observation.
    pub fn reset(&mut self) -> Vec<f64> {
        let initial_obj = objective_value(
            self.graph,
            &Decomposition::single_service(self.cfg.n_methods),
            self.cfg.objective,
        );
        let s = &mut self.state;
        s.assignment.iter_mut().for_each(|a| *a = 0);
        s.best_assignment.iter_mut().for_each(|a| *a = 0);
        s.cursor = 0;
        s.pass = 0;
        s.steps = 0;
        s.obj_best = initial_obj;
        s.done = false;
        self.observation()
    }

    pub fn observation(&self) -> Vec<f64> {
        let (n, s_max) = (self.cfg.n_methods, self.cfg.s_max);
        let mut obs = vec![0.0; self.cfg.observation_len()];
        for (m, &s) in self.state.assignment.iter().enumerate() {
            obs[m * s_max + s] = 1.0;
        }
        if !self.state.done {
            obs[n * s_max + self.state.cursor] = 1.0;
        }
        obs
    }

    /// Positions of the ones in [`Self::observation`], ascending.
    pub fn observation_indices(&self) -> Vec<usize> {
        let (n, s_max) = (self.cfg.n_methods, self.cfg.s_max);
        let mut idx: Vec<usize> = self.state.assignment.iter().enumerate().map(|(m, &s)| m * s_max + s).collect();
        if !self.state.done {
            idx.push(n * s_max + self.state.cursor);
        }
        idx
    }

    pub fn current_decomposition(&self) -> Decomposition {
        Decomposition::new(self.state.assignment.clone())
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        if self.state.done {
            return Err(EnvError::StepAfterDone);
        }
        if action >= self.cfg.s_max {
            return Err(EnvError::ActionOutOfRange { action, s_max: self.cfg.s_max });
        }
        let method = self.state.cursor;
        self.state.assignment[method] = action;

        let decomposition = self.current_decomposition();
        let objective = objective_value(self.graph, &decomposition, self.cfg.objective);
        let reward = objective - self.state.obj_best;
        if objective > self.state.obj_best {
            self.state.obj_best = objective;
            self.state.best_assignment.clone_from(&self.state.assignment);
        }

        self.state.steps += 1;
        self.state.cursor += 1;
        if self.state.cursor == self.cfg.n_methods {
            self.state.cursor = 0;
            self.state.pass += 1;
            if self.state.pass == self.cfg.p_max {
                self.state.done = true;
            }
        }

        Ok(StepOutcome {
            observation: self.observation(),
            reward,
            done: self.state.done,
            info: StepInfo {
                objective,
                services: decomposition.service_count(),
                method,
            },
        })
    }

    /// Best decomposition of the episode so far, canonically relabeled.
    pub fn best_decomposition(&self) -> Decomposition {
        Decomposition::new(self.state.best_assignment.clone()).compacted()
    }

    pub fn best_objective(&self) -> f64 {
        self.state.obj_best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn edgeless(n: usize) -> CallGraph {
        CallGraph::new((0..n).map(|i| format!("m{i}")).collect(), [], vec![BTreeSet::new(); n]).unwrap()
    }

    fn two_cliques() -> CallGraph {
        CallGraph::new(
            (0..4).map(|i| format!("m{i}")).collect(),
            [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1)],
            vec![BTreeSet::new(); 4],
        )
        .unwrap()
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("mq".parse::<Objective>().unwrap(), Objective::Mq);
        assert_eq!("ABCP".parse::<Objective>().unwrap(), Objective::Abcp);
        assert_eq!("weighted:0.25".parse::<Objective>().unwrap(), Objective::Weighted(0.25));
        assert!("weighted:1.5".parse::<Objective>().is_err());
        assert!("weighted:".parse::<Objective>().is_err());
        assert!("entropy".parse::<Objective>().is_err());
        assert_eq!(Objective::Weighted(0.5).to_string(), "weighted:0.5");
    }

    #[test]
    fn service_cap() {
        assert_eq!(max_services(1), 1);
        assert_eq!(max_services(7), 4);
        assert_eq!(max_services(20), 10);
    }

    #[test]
    fn reset_state() {
        let g = edgeless(20);
        let mut env = ServiceEnv::new(EnvConfig::new(20, 3, Objective::Mq).unwrap(), &g).unwrap();
        let obs = env.reset();
        let matrix = env.state().assignment_matrix(10);
        assert!(matrix.iter().all(|row| row[0] == 1 && row[1..].iter().all(|&x| x == 0)));
        assert_eq!(obs.len(), 20 * 10 + 20);
        assert_eq!(obs[200], 1.0);
        let ones: Vec<usize> = (0..obs.len()).filter(|&i| obs[i] == 1.0).collect();
        assert_eq!(env.observation_indices(), ones);
        assert_eq!(env.best_objective(), 0.0);
    }

    #[test]
    fn single_method_has_one_action() {
        let g = edgeless(1);
        let mut env = ServiceEnv::new(EnvConfig::new(1, 2, Objective::Mq).unwrap(), &g).unwrap();
        assert_eq!(env.config().s_max, 1);
        assert!(env.step(0).is_ok());
        assert_eq!(env.step(1), Err(EnvError::ActionOutOfRange { action: 1, s_max: 1 }));
    }

    #[test]
    fn episode_lasts_n_times_pmax() {
        let g = edgeless(20);
        let mut env = ServiceEnv::new(EnvConfig::new(20, 3, Objective::Mq).unwrap(), &g).unwrap();
        let mut steps = 0;
        loop {
            steps += 1;
            if env.step(steps % 10).unwrap().done {
                break;
            }
        }
        assert_eq!(steps, 60);
        assert_eq!(env.step(0), Err(EnvError::StepAfterDone));
    }

    #[test]
    fn mismatched_graph() {
        let g = edgeless(3);
        assert!(matches!(
            ServiceEnv::new(EnvConfig::new(4, 1, Objective::Mq).unwrap(), &g),
            Err(EnvError::GraphEnvMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn no_op_step_cannot_improve() {
        let g = two_cliques();
        let mut env = ServiceEnv::new(EnvConfig::new(4, 1, Objective::Mq).unwrap(), &g).unwrap();
        let out = env.step(0).unwrap();
        assert!(out.reward <= 0.0);
        assert_eq!(out.reward, 0.0);
    }

    #[test]
    fn rewards_track_running_best() {
        let g = two_cliques();
        let mut env = ServiceEnv::new(EnvConfig::new(4, 2, Objective::Mq).unwrap(), &g).unwrap();
        // Initial MQ: μ = 4 of 16.
        assert_eq!(env.best_objective(), 0.25);
        let mut best = 0.25;
        for action in [0, 0, 1, 1, 1, 0, 1, 1] {
            let out = env.step(action).unwrap();
            assert_eq!(out.reward, out.info.objective - best);
            best = best.max(out.info.objective);
            assert_eq!(env.best_objective(), best);
        }
        assert_eq!(best, 0.5);
        assert_eq!(env.best_decomposition().assignment(), [0, 0, 1, 1]);
    }

    #[test]
    fn objective_scales() {
        let g = two_cliques();
        let d = Decomposition::new(vec![0, 0, 1, 1]);
        assert_eq!(objective_value(&g, &d, Objective::Mq), 0.5);
        assert_eq!(objective_value(&g, &d, Objective::Weighted(1.0)), 0.75);
        assert_eq!(objective_value(&edgeless(3), &Decomposition::single_service(3), Objective::Mq), 0.0);
    }
}
