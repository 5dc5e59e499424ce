use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{clip_grad_norm, Adam};
use super::network::{log_softmax, softmax, Features, PolicyNet};
use super::rollout::{normalize, RolloutBuffer};
use super::AgentError;

/// Loss and update settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PpoParams {
    pub clip_eps: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub max_grad_norm: f64,
}

impl Default for PpoParams {
    fn default() -> Self {
        Self {
            clip_eps: 0.2,
            value_coef: 0.5,
            entropy_coef: 0.01,
            epochs: 4,
            minibatch_size: 64,
            max_grad_norm: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionChoice {
    pub action: usize,
    pub log_prob: f64,
    pub value: f64,
}

/// Samples an action from the policy, or takes the argmax of the logits
/// (lowest index on ties) when `greedy` is set.
pub fn select_action<R: Rng + ?Sized>(
    net: &PolicyNet,
    features: &Features,
    rng: &mut R,
    greedy: bool,
) -> Result<ActionChoice, AgentError> {
    if !net.accepts(features) {
        let actual = match features {
            Features::Dense(x) => x.len(),
            Features::Binary(idx) => idx.iter().max().map_or(0, |m| m + 1),
        };
        return Err(AgentError::ShapeMismatch { expected: net.spec().input, actual });
    }
    let pass = net.forward(features);
    let log_probs = log_softmax(&pass.logits);
    let action = if greedy {
        argmax(&pass.logits)
    } else {
        sample(&softmax(&pass.logits), rng.random::<f64>())
    };
    Ok(ActionChoice { action, log_prob: log_probs[action], value: pass.value })
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Inverse-CDF draw for `u ∈ [0, 1)`.
fn sample(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` slightly below 1.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossStats {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    /// Mean of `log π_old − log π_new`.
    pub approx_kl: f64,
    /// Share of samples whose ratio left the clip range.
    pub clip_fraction: f64,
}

/// Clipped-surrogate loss over the samples `idx` of `buffer` and its gradient
/// with respect to the network parameters:
///
/// `−mean(min(ρA, clip(ρ, 1−ε, 1+ε)A)) + c_v · ½ mean((V − R)²) − c_e · mean(H)`
pub fn ppo_loss(
    net: &PolicyNet,
    buffer: &RolloutBuffer,
    idx: &[usize],
    advantages: &[f64],
    returns: &[f64],
    params: &PpoParams,
) -> (LossStats, Vec<f64>) {
    let mut grad = vec![0.0; net.param_count()];
    let mut stats = LossStats::default();
    let b = idx.len() as f64;
    let (lo, hi) = (1.0 - params.clip_eps, 1.0 + params.clip_eps);

    for &t in idx {
        let pass = net.forward(&buffer.features[t]);
        let log_p = log_softmax(&pass.logits);
        let p: Vec<f64> = log_p.iter().map(|l| l.exp()).collect();
        let a = buffer.actions[t];
        let adv = advantages[t];

        let ratio = (log_p[a] - buffer.log_probs[t]).exp();
        let unclipped = ratio * adv;
        let clipped = ratio.clamp(lo, hi) * adv;
        let entropy: f64 = -p.iter().zip(&log_p).map(|(p, l)| if *p > 0.0 { p * l } else { 0.0 }).sum::<f64>();
        let v_err = pass.value - returns[t];

        stats.policy -= unclipped.min(clipped) / b;
        stats.value += 0.5 * v_err * v_err / b;
        stats.entropy += entropy / b;
        stats.approx_kl += (buffer.log_probs[t] - log_p[a]) / b;
        if !(lo..=hi).contains(&ratio) {
            stats.clip_fraction += 1.0 / b;
        }

        // ∂/∂ log π(a): the clipped branch is flat in ρ whenever it is the minimum.
        let d_logp = if unclipped <= clipped { -ratio * adv / b } else { 0.0 };
        let d_logits: Vec<f64> = (0..p.len())
            .map(|j| {
                let indicator = if j == a { 1.0 } else { 0.0 };
                // dH/dz_j = −p_j (log p_j + H)
                let d_entropy = -p[j] * (log_p[j] + entropy);
                d_logp * (indicator - p[j]) - params.entropy_coef * d_entropy / b
            })
            .collect();
        let d_value = params.value_coef * v_err / b;
        net.backward(&pass, &d_logits, d_value, &mut grad);
    }
    stats.total = stats.policy + params.value_coef * stats.value - params.entropy_coef * stats.entropy;
    (stats, grad)
}

/// Runs `epochs` passes of shuffled minibatch updates over `buffer`.
/// Advantages are normalized over the whole buffer first. Returns the mean
/// statistics of the last epoch.
#[allow(clippy::too_many_arguments)]
pub fn ppo_update<R: Rng + ?Sized>(
    net: &mut PolicyNet,
    adam: &mut Adam,
    buffer: &RolloutBuffer,
    advantages: &[f64],
    returns: &[f64],
    params: &PpoParams,
    update: usize,
    rng: &mut R,
) -> Result<LossStats, AgentError> {
    if buffer.is_empty() {
        return Err(AgentError::EmptyBuffer);
    }
    let mut adv = advantages.to_vec();
    normalize(&mut adv);

    let mut order: Vec<usize> = (0..buffer.len()).collect();
    let mut last = LossStats::default();
    for _ in 0..params.epochs {
        order.shuffle(rng);
        let mut epoch = LossStats::default();
        let mut batches = 0.0;
        for chunk in order.chunks(params.minibatch_size.max(1)) {
            let (stats, mut grad) = ppo_loss(net, buffer, chunk, &adv, returns, params);
            if !stats.total.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(AgentError::NonFiniteLoss {
                    update,
                    detail: format!(
                        "policy {} value {} entropy {} kl {}",
                        stats.policy, stats.value, stats.entropy, stats.approx_kl
                    ),
                });
            }
            clip_grad_norm(&mut grad, params.max_grad_norm);
            adam.step(net.params_mut(), &grad);
            debug_assert!(net.all_finite(), "non-finite parameters after update {update}");

            epoch.total += stats.total;
            epoch.policy += stats.policy;
            epoch.value += stats.value;
            epoch.entropy += stats.entropy;
            epoch.approx_kl += stats.approx_kl;
            epoch.clip_fraction += stats.clip_fraction;
            batches += 1.0;
        }
        last = LossStats {
            total: epoch.total / batches,
            policy: epoch.policy / batches,
            value: epoch.value / batches,
            entropy: epoch.entropy / batches,
            approx_kl: epoch.approx_kl / batches,
            clip_fraction: epoch.clip_fraction / batches,
        };
    }
    Ok(last)
}
