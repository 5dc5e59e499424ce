use super::network::Features;
use super::AgentError;

/// Transitions of one or more episodes, in time order.
#[derive(Debug, Clone, Default)]
pub struct RolloutBuffer {
    pub features: Vec<Features>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Vec<f64>,
    /// True when the episode ended after this transition.
    pub dones: Vec<bool>,
}

impl RolloutBuffer {
    pub fn push(&mut self, features: Features, action: usize, log_prob: f64, value: f64, reward: f64, done: bool) {
        self.features.push(features);
        self.actions.push(action);
        self.log_probs.push(log_prob);
        self.values.push(value);
        self.rewards.push(reward);
        self.dones.push(done);
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn clear(&mut self) {
        *self = Self::default();
    }
}

/// Generalized advantage estimation.
///
/// Returns `(advantages, returns)` with `returns[t] = advantages[t] + values[t]`.
/// `last_value` bootstraps the transition after the buffer end and is ignored
/// when that transition is terminal.
pub fn compute_gae(
    buffer: &RolloutBuffer,
    gamma: f64,
    lambda: f64,
    last_value: f64,
) -> Result<(Vec<f64>, Vec<f64>), AgentError> {
    if buffer.is_empty() {
        return Err(AgentError::EmptyBuffer);
    }
    let n = buffer.len();
    let mut adv = vec![0.0; n];
    let mut running = 0.0;
    for t in (0..n).rev() {
        let not_done = if buffer.dones[t] { 0.0 } else { 1.0 };
        let next_value = if t + 1 < n { buffer.values[t + 1] } else { last_value };
        let delta = buffer.rewards[t] + gamma * next_value * not_done - buffer.values[t];
        running = delta + gamma * lambda * not_done * running;
        adv[t] = running;
    }
    let returns = adv.iter().zip(&buffer.values).map(|(a, v)| a + v).collect();
    Ok((adv, returns))
}

/// Shifts and scales to zero mean and unit standard deviation.
pub fn normalize(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt() + 1e-8;
    xs.iter_mut().for_each(|x| *x = (*x - mean) / std);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buffer(rewards: &[f64], values: &[f64], dones: &[bool]) -> RolloutBuffer {
        let mut b = RolloutBuffer::default();
        for i in 0..rewards.len() {
            b.push(Features::Dense(vec![]), 0, 0.0, values[i], rewards[i], dones[i]);
        }
        b
    }

    #[test]
    fn empty_buffer_is_an_error() {
        assert!(matches!(compute_gae(&RolloutBuffer::default(), 0.99, 0.95, 0.0), Err(AgentError::EmptyBuffer)));
    }

    #[test]
    fn lambda_one_gives_discounted_returns() {
        let b = buffer(&[1.0, 2.0, 3.0], &[0.5, 0.5, 0.5], &[false, false, true]);
        let (adv, ret) = compute_gae(&b, 0.9, 1.0, 100.0).unwrap();
        let expect = [1.0 + 0.9 * 2.0 + 0.81 * 3.0, 2.0 + 0.9 * 3.0, 3.0];
        for t in 0..3 {
            assert!((ret[t] - expect[t]).abs() < 1e-12);
            assert!((adv[t] - (expect[t] - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_zero_gives_td_errors() {
        let b = buffer(&[1.0, 0.0], &[0.2, 0.4], &[false, false]);
        let (adv, _) = compute_gae(&b, 0.5, 0.0, 0.8).unwrap();
        assert!((adv[0] - (1.0 + 0.5 * 0.4 - 0.2)).abs() < 1e-12);
        assert!((adv[1] - (0.0 + 0.5 * 0.8 - 0.4)).abs() < 1e-12);
    }

    #[test]
    fn episode_boundaries_stop_propagation() {
        let b = buffer(&[0.0, 5.0], &[0.0, 0.0], &[true, true]);
        let (adv, _) = compute_gae(&b, 0.99, 0.95, 0.0).unwrap();
        assert_eq!(adv, [0.0, 5.0]);
    }

    #[test]
    fn normalization() {
        let mut xs = vec![1.0, 2.0, 3.0, 4.0];
        normalize(&mut xs);
        assert!(xs.iter().sum::<f64>().abs() < 1e-12);
        let var = xs.iter().map(|x| x * x).sum::<f64>() / 4.0;
        assert!((var - 1.0).abs() < 1e-6);
    }
}
