use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::network::{Features, NetSpec, PolicyNet};
use super::ppo::{ppo_update, select_action, PpoParams};
use super::rollout::{compute_gae, RolloutBuffer};
use super::AgentError;
use crate::env::{objective_value, EnvConfig, ServiceEnv};
use crate::graph::CallGraph;
use crate::metrics::Decomposition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub episodes: usize,
    pub learning_rate: f64,
    pub clip_eps: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub max_grad_norm: f64,
    pub hidden: Vec<usize>,
    pub seed: u64,
    /// Stop once the global best has not improved for this many episodes.
    pub patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let ppo = PpoParams::default();
        Self {
            episodes: 1500,
            learning_rate: 3e-4,
            clip_eps: ppo.clip_eps,
            gamma: 0.99,
            gae_lambda: 0.95,
            epochs: ppo.epochs,
            minibatch_size: ppo.minibatch_size,
            entropy_coef: ppo.entropy_coef,
            value_coef: ppo.value_coef,
            max_grad_norm: ppo.max_grad_norm,
            hidden: vec![128, 128],
            seed: 0,
            patience: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("gamma", self.gamma),
            ("gae_lambda", self.gae_lambda),
            ("entropy_coef", self.entropy_coef),
            ("value_coef", self.value_coef),
            ("max_grad_norm", self.max_grad_norm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(AgentError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.clip_eps > 0.0 && self.clip_eps < 1.0) {
            return Err(AgentError::InvalidConfig(format!("clip_eps must lie in (0, 1), got {}", self.clip_eps)));
        }
        if self.gamma > 1.0 || self.gae_lambda > 1.0 {
            return Err(AgentError::InvalidConfig("gamma and gae_lambda must not exceed 1".into()));
        }
        if self.epochs == 0 || self.minibatch_size == 0 {
            return Err(AgentError::InvalidConfig("epochs and minibatch_size must be positive".into()));
        }
        if self.hidden.contains(&0) {
            return Err(AgentError::InvalidConfig("hidden layer widths must be positive".into()));
        }
        if self.patience == Some(0) {
            return Err(AgentError::InvalidConfig("patience must be positive".into()));
        }
        Ok(())
    }

    pub fn ppo_params(&self) -> PpoParams {
        PpoParams {
            clip_eps: self.clip_eps,
            value_coef: self.value_coef,
            entropy_coef: self.entropy_coef,
            epochs: self.epochs,
            minibatch_size: self.minibatch_size,
            max_grad_norm: self.max_grad_norm,
        }
    }

    pub fn net_spec(&self, env: &EnvConfig) -> NetSpec {
        NetSpec {
            input: env.observation_len(),
            hidden: self.hidden.clone(),
            actions: env.s_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub episode_best: f64,
    pub global_best: f64,
    /// Mean policy entropy during the update.
    pub entropy: f64,
    /// Seconds since training started.
    pub wall_time: f64,
}

/// Tab-separated training log. Wall time is machine dependent, so it is only
/// written when asked for.
pub fn training_log_tsv(log: &[EpisodeLog], with_wall_time: bool) -> String {
    let mut out = String::from("episode\tepisode_best\tglobal_best\tentropy");
    out.push_str(if with_wall_time { "\twall_time\n" } else { "\n" });
    for e in log {
        out.push_str(&format!("{}\t{:.12}\t{:.12}\t{:.12}", e.episode, e.episode_best, e.global_best, e.entropy));
        if with_wall_time {
            out.push_str(&format!("\t{:.3}", e.wall_time));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Best decomposition over all episodes, canonically relabeled.
    pub best: Decomposition,
    pub best_objective: f64,
    /// Objective of the single-service start state.
    pub initial_objective: f64,
    pub log: Vec<EpisodeLog>,
    pub net: PolicyNet,
    pub adam: Adam,
    pub stopped_early: bool,
}

pub fn train(g: &CallGraph, env_cfg: &EnvConfig, cfg: &TrainConfig) -> Result<TrainOutcome, AgentError> {
    train_with(g, env_cfg, cfg, |_| {})
}

/// Like [`train`], calling `on_episode` after every episode.
pub fn train_with(
    g: &CallGraph,
    env_cfg: &EnvConfig,
    cfg: &TrainConfig,
    mut on_episode: impl FnMut(&EpisodeLog),
) -> Result<TrainOutcome, AgentError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut env = ServiceEnv::new(*env_cfg, g)?;
    let mut net = PolicyNet::new(cfg.net_spec(env_cfg), &mut rng);
    let mut adam = Adam::new(net.param_count(), cfg.learning_rate);
    let ppo = cfg.ppo_params();

    let initial_objective = objective_value(g, &Decomposition::single_service(g.len()), env_cfg.objective);
    let mut best = Decomposition::single_service(g.len());
    let mut best_objective = initial_objective;
    let mut log = Vec::with_capacity(cfg.episodes);
    let mut since_improvement = 0;
    let mut stopped_early = false;
    let mut buffer = RolloutBuffer::default();

    for episode in 0..cfg.episodes {
        env.reset();
        buffer.clear();
        loop {
            let features = Features::Binary(env.observation_indices());
            let choice = select_action(&net, &features, &mut rng, false)?;
            let out = env.step(choice.action)?;
            buffer.push(features, choice.action, choice.log_prob, choice.value, out.reward, out.done);
            if out.done {
                break;
            }
        }

        let episode_best = env.best_objective();
        if episode_best > best_objective {
            best_objective = episode_best;
            best = env.best_decomposition();
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }

        let (advantages, returns) = compute_gae(&buffer, cfg.gamma, cfg.gae_lambda, 0.0)?;
        let stats = ppo_update(&mut net, &mut adam, &buffer, &advantages, &returns, &ppo, episode, &mut rng)?;

        let entry = EpisodeLog {
            episode,
            episode_best,
            global_best: best_objective,
            entropy: stats.entropy,
            wall_time: start.elapsed().as_secs_f64(),
        };
        on_episode(&entry);
        log.push(entry);

        if cfg.patience.is_some_and(|p| since_improvement >= p) {
            stopped_early = episode + 1 < cfg.episodes;
            break;
        }
    }

    Ok(TrainOutcome {
        best: best.compacted(),
        best_objective,
        initial_objective,
        log,
        net,
        adam,
        stopped_early,
    })
}

/// Plays one episode choosing the most likely action at every step. Returns
/// the best decomposition of the episode and its objective.
pub fn greedy_rollout(net: &PolicyNet, g: &CallGraph, env_cfg: &EnvConfig) -> Result<(Decomposition, f64), AgentError> {
    let mut env = ServiceEnv::new(*env_cfg, g)?;
    // Greedy selection never draws from the generator.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    loop {
        let features = Features::Binary(env.observation_indices());
        let choice = select_action(net, &features, &mut rng, true)?;
        if env.step(choice.action)?.done {
            break;
        }
    }
    Ok((env.best_decomposition(), env.best_objective()))
}
