use proptest::prelude::*;
use svcsplit::env::{objective_value, EnvConfig, Objective, ServiceEnv};
use svcsplit::metrics::Decomposition;
use svcsplit::synthetic::random_graph;

fn objective() -> impl Strategy<Value = Objective> {
    prop_oneof![Just(Objective::Mq), Just(Objective::Abcp), (0.0f64..=1.0).prop_map(Objective::Weighted)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rewards_replay_against_running_maximum(
        n in 1usize..=9,
        p_max in 1usize..=3,
        seed in any::<u64>(),
        obj in objective(),
        raw_actions in prop::collection::vec(any::<usize>(), 27),
    ) {
        let g = random_graph(n, 0.3, 3, seed);
        let cfg = EnvConfig::new(n, p_max, obj).unwrap();
        let mut env = ServiceEnv::new(cfg, &g).unwrap();
        env.reset();

        let mut assignment = vec![0; n];
        let mut history = vec![objective_value(&g, &Decomposition::new(assignment.clone()), obj)];
        for t in 0..cfg.episode_len() {
            let action = raw_actions[t % raw_actions.len()] % cfg.s_max;
            let obs = env.observation();
            prop_assert_eq!(obs.iter().filter(|&&x| x == 1.0).count(), n + 1);
            prop_assert_eq!(obs[n * cfg.s_max + t % n], 1.0);

            let out = env.step(action).unwrap();
            assignment[t % n] = action;
            let j = objective_value(&g, &Decomposition::new(assignment.clone()), obj);
            let prior = history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(out.info.objective, j);
            prop_assert_eq!(out.reward, j - prior);
            prop_assert_eq!(out.done, t + 1 == cfg.episode_len());
            history.push(j);
        }
        let best = history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(env.best_objective(), best);
        prop_assert_eq!(objective_value(&g, &env.best_decomposition(), obj), best);
        prop_assert!(env.best_decomposition().service_count() <= cfg.s_max);
    }

    #[test]
    fn observation_is_a_valid_one_hot_matrix(n in 1usize..=8, seed in any::<u64>(), actions in prop::collection::vec(any::<usize>(), 1..20)) {
        let g = random_graph(n, 0.3, 2, seed);
        let cfg = EnvConfig::new(n, 3, Objective::Mq).unwrap();
        let mut env = ServiceEnv::new(cfg, &g).unwrap();
        for a in actions.iter().take(cfg.episode_len()) {
            let out = env.step(a % cfg.s_max).unwrap();
            for m in 0..n {
                let row = &out.observation[m * cfg.s_max..(m + 1) * cfg.s_max];
                prop_assert_eq!(row.iter().sum::<f64>(), 1.0);
            }
            let mut expected = env.observation_indices();
            expected.sort_unstable();
            let ones: Vec<usize> = (0..out.observation.len()).filter(|&i| out.observation[i] == 1.0).collect();
            prop_assert_eq!(ones, expected);
        }
    }
}

#[test]
fn reset_restores_the_initial_state() {
    let g = random_graph(6, 0.4, 2, 3);
    let cfg = EnvConfig::new(6, 2, Objective::Abcp).unwrap();
    let mut env = ServiceEnv::new(cfg, &g).unwrap();
    let first = env.observation();
    let initial = env.best_objective();
    while !env.step(2).unwrap().done {}
    assert_eq!(env.reset(), first);
    assert_eq!(env.best_objective(), initial);
    assert_eq!(env.state().steps, 0);
}
