//! Reference optimizers: exhaustive search over set partitions for small
//! graphs and a random-restart hill climber for larger ones.
//!
//! Both respect the environment's `⌈N/2⌉` service cap, so their optima are
//! reachable by the agent.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{max_services, objective_value, Objective};
use crate::graph::CallGraph;
use crate::metrics::Decomposition;

/// Largest N accepted by exhaustive search unless overridden.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 10;

/// Objective differences below this count as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} methods exceed the exhaustive-search cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("invalid oracle config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub decomposition: Decomposition,
    pub objective: f64,
    /// Partitions (exhaustive) or objective evaluations (hill climbing).
    pub evaluated: u64,
    pub elapsed_secs: f64,
}

/// Restricted growth strings of length `n` with at most `max_blocks` distinct
/// values, in lexicographic order. Each is a set partition of `0..n`.
#[derive(Debug, Clone)]
pub struct Partitions {
    current: Vec<usize>,
    max_blocks: usize,
    started: bool,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        let a = &mut self.current;
        for i in (1..a.len()).rev() {
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= prefix_max && a[i] + 1 < self.max_blocks {
                a[i] += 1;
                a[i + 1..].iter_mut().for_each(|x| *x = 0);
                return Some(a.clone());
            }
        }
        self.done = true;
        None
    }
}

/// All partitions of `0..n` into at most `max_blocks` blocks. `n = 0` yields
/// the single empty partition.
pub fn partitions(n: usize, max_blocks: usize) -> Partitions {
    Partitions {
        current: vec![0; n],
        max_blocks: max_blocks.max(1),
        started: false,
        done: false,
    }
}

/// Partitions of `0..n` under the environment's service cap, refusing `n > cap`.
pub fn enumerate_partitions(n: usize, cap: usize) -> Result<Partitions, OracleError> {
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    Ok(partitions(n, max_services(n)))
}

/// Best partition by exhaustive search. Ties within [`TIE_TOLERANCE`] go to
/// the lexicographically smallest restricted growth string.
pub fn exhaustive_best(g: &CallGraph, objective: Objective, cap: usize) -> Result<OracleResult, OracleError> {
    let start = Instant::now();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut evaluated = 0;
    for rgs in enumerate_partitions(g.len(), cap)? {
        evaluated += 1;
        let value = objective_value(g, &Decomposition::new(rgs.clone()), objective);
        if best.as_ref().is_none_or(|(_, b)| value > b + TIE_TOLERANCE) {
            best = Some((rgs, value));
        }
    }
    let (assignment, objective) = best.expect("at least one partition");
    Ok(OracleResult {
        decomposition: Decomposition::new(assignment),
        objective,
        evaluated,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Steepest-ascent local search over single-method moves. The first restart
/// begins from the single-service decomposition, the others from uniformly
/// random assignments.
pub fn hill_climb(g: &CallGraph, objective: Objective, restarts: usize, seed: u64) -> Result<OracleResult, OracleError> {
    if restarts == 0 {
        return Err(OracleError::InvalidConfig("restarts must be at least 1".into()));
    }
    let start = Instant::now();
    let n = g.len();
    let s_max = max_services(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluated = 0u64;
    let mut eval = |assignment: &[usize]| {
        evaluated += 1;
        objective_value(g, &Decomposition::new(assignment.to_vec()), objective)
    };

    let mut best: Option<(Decomposition, f64)> = None;
    for r in 0..restarts {
        let mut current: Vec<usize> = if r == 0 {
            vec![0; n]
        } else {
            (0..n).map(|_| rng.random_range(0..s_max)).collect()
        };
        let mut value = eval(&current);
        loop {
            let mut best_move: Option<(usize, usize, f64)> = None;
            for m in 0..n {
                let home = current[m];
                for target in (0..s_max).filter(|&t| t != home) {
                    current[m] = target;
                    let v = eval(&current);
                    if v > value + 1e-12 && best_move.is_none_or(|(_, _, bv)| v > bv) {
                        best_move = Some((m, target, v));
                    }
                }
                current[m] = home;
            }
            match best_move {
                Some((m, target, v)) => {
                    current[m] = target;
                    value = v;
                }
                None => break,
            }
        }
        let d = Decomposition::new(current).compacted();
        if best.as_ref().is_none_or(|(_, b)| value > b + TIE_TOLERANCE) {
            best = Some((d, value));
        }
    }
    let (decomposition, objective) = best.expect("restarts > 0");
    Ok(OracleResult {
        decomposition,
        objective,
        evaluated,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    fn graph(n: usize, edges: &[(usize, usize)]) -> CallGraph {
        CallGraph::new(
            (0..n).map(|i| format!("m{i}")).collect(),
            edges.iter().map(|&(a, b)| (a, b, 1)),
            vec![BTreeSet::new(); n],
        )
        .unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(partitions(3, 3).count(), 5);
        assert_eq!(partitions(4, 2).count(), 8);
        assert_eq!(partitions(1, 1).count(), 1);
        assert_eq!(partitions(0, 1).count(), 1);
        assert_eq!(enumerate_partitions(4, 10).unwrap().count(), 8);
    }

    #[test]
    fn rgs_are_lexicographic_and_distinct() {
        let all: Vec<Vec<usize>> = partitions(5, 3).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        for rgs in &all {
            assert_eq!(rgs[0], 0);
            for i in 1..rgs.len() {
                assert!(rgs[i] <= rgs[..i].iter().max().unwrap() + 1);
            }
            assert!(rgs.iter().all(|&b| b < 3));
        }
    }

    #[test]
    fn too_large() {
        let g = graph(11, &[]);
        assert_eq!(
            exhaustive_best(&g, Objective::Mq, DEFAULT_EXHAUSTIVE_CAP).unwrap_err(),
            OracleError::TooLarge { n: 11, cap: 10 }
        );
    }

    #[test]
    fn two_cliques_optimum() {
        let g = graph(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        let r = exhaustive_best(&g, Objective::Mq, 10).unwrap();
        assert_eq!(r.decomposition.assignment(), [0, 0, 1, 1]);
        assert!((r.objective - 0.5).abs() < 1e-12);
        assert_eq!(r.evaluated, 8);
    }

    #[test]
    fn edgeless_ties_resolve_to_single_service() {
        let r = exhaustive_best(&graph(5, &[]), Objective::Mq, 10).unwrap();
        assert_eq!(r.decomposition.assignment(), [0; 5]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn hill_climb_finds_two_cliques_and_is_local_optimum() {
        let g = graph(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        let r = hill_climb(&g, Objective::Mq, 5, 1).unwrap();
        assert!((r.objective - 0.5).abs() < 1e-12);
        let s_max = max_services(4);
        for m in 0..4 {
            for t in 0..s_max {
                let mut a = r.decomposition.assignment().to_vec();
                a[m] = t;
                assert!(objective_value(&g, &Decomposition::new(a), Objective::Mq) <= r.objective + 1e-12);
            }
        }
    }

    #[test]
    fn zero_restarts_is_invalid() {
        assert!(matches!(hill_climb(&graph(2, &[]), Objective::Mq, 0, 0), Err(OracleError::InvalidConfig(_))));
    }
}
