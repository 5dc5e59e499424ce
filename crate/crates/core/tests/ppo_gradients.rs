use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svcsplit::agent::{compute_gae, ppo_loss, Features, NetSpec, PolicyNet, PpoParams, RolloutBuffer};

/// Buffer over fixed inputs whose stored log-probabilities put the ratio
/// well inside and well outside the clip range, for both advantage signs.
fn scenario(net: &PolicyNet) -> (RolloutBuffer, Vec<f64>, Vec<f64>) {
    let inputs = [[0.4, -0.3], [1.0, 0.5], [-0.7, 0.2], [0.1, 0.9], [-0.2, -0.8], [0.6, 0.6]];
    let ratio_shift = [0.0, 0.5, -0.6, 0.45, -0.5, 0.1];
    let actions = [0, 1, 2, 1, 0, 2];
    let mut b = RolloutBuffer::default();
    for i in 0..inputs.len() {
        let x = Features::Dense(inputs[i].to_vec());
        let pass = net.forward(&x);
        let lp = svcsplit::agent::log_softmax(&pass.logits)[actions[i]];
        // Stored log π_old = log π − shift, so ρ = exp(shift).
        b.push(x, actions[i], lp - ratio_shift[i], pass.value, 0.0, i == inputs.len() - 1);
    }
    let advantages = vec![1.0, 0.8, -1.2, -0.5, 0.7, -0.3];
    let returns = vec![0.5, -0.2, 0.1, 0.9, -0.4, 0.3];
    (b, advantages, returns)
}

fn numeric_gradient(net: &mut PolicyNet, loss: impl Fn(&PolicyNet) -> f64) -> Vec<f64> {
    let h = 1e-6;
    (0..net.param_count())
        .map(|i| {
            let orig = net.params()[i];
            net.params_mut()[i] = orig + h;
            let up = loss(net);
            net.params_mut()[i] = orig - h;
            let down = loss(net);
            net.params_mut()[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    diff / scale.max(1e-12)
}

#[test]
fn clipped_surrogate_gradient_matches_finite_differences() {
    for hidden in [vec![], vec![5], vec![4, 3]] {
        let mut net = PolicyNet::new(NetSpec { input: 2, hidden: hidden.clone(), actions: 3 }, &mut ChaCha8Rng::seed_from_u64(11));
        let (b, adv, ret) = scenario(&net);
        let idx: Vec<usize> = (0..b.len()).collect();
        let params = PpoParams::default();
        let (stats, analytic) = ppo_loss(&net, &b, &idx, &adv, &ret, &params);
        assert!(stats.clip_fraction > 0.0 && stats.clip_fraction < 1.0, "both branches exercised");
        let numeric = numeric_gradient(&mut net, |n| ppo_loss(n, &b, &idx, &adv, &ret, &params).0.total);
        let err = relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "hidden {hidden:?}: relative error {err}");
    }
}

#[test]
fn gae_special_cases() {
    let mut b = RolloutBuffer::default();
    for (r, v) in [(1.0, 0.3), (-2.0, 0.1), (0.5, -0.4)] {
        b.push(Features::Dense(vec![]), 0, 0.0, v, r, false);
    }
    let (_, returns) = compute_gae(&b, 0.0, 0.95, 7.0).unwrap();
    assert_eq!(returns, [1.0, -2.0, 0.5]);

    let mut single = RolloutBuffer::default();
    single.push(Features::Dense(vec![]), 0, 0.0, 0.0, 1.0, true);
    assert_eq!(compute_gae(&single, 0.99, 0.95, 0.0).unwrap().0, [1.0]);
}
