//! Cohesion, coupling, MQ, ICP and IFN.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Decomposition, Partition};
use crate::graph::CallGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct Cohesion {
    pub value: f64,
    /// `μ_i / N_i²` per non-empty service.
    pub per_service: Vec<f64>,
    /// Unique intra-service edges `μ_i`, self-loops included.
    pub intra_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCoupling {
    pub i: usize,
    pub j: usize,
    /// Unique directed edges between the two services, both directions.
    pub edges: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub value: f64,
    pub pairs: Vec<PairCoupling>,
    /// Set when `k = 1` and coupling is undefined (reported as 0).
    pub single_service: bool,
}

pub fn cohesion(g: &CallGraph, d: &Decomposition) -> Cohesion {
    check_sizes(g, d);
    let p = Partition::of(d);
    let mut intra = vec![0usize; p.k];
    for e in g.edges() {
        let (a, b) = (p.labels[e.caller], p.labels[e.callee]);
        if a == b {
            intra[a] += 1;
        }
    }
    let per_service: Vec<f64> = intra
        .iter()
        .zip(&p.sizes)
        .map(|(&mu, &n)| mu as f64 / (n * n) as f64)
        .collect();
    let value = mean(&per_service);
    Cohesion { value, per_service, intra_edges: intra }
}

pub fn coupling(g: &CallGraph, d: &Decomposition) -> Coupling {
    check_sizes(g, d);
    let p = Partition::of(d);
    if p.k < 2 {
        return Coupling { value: 0.0, pairs: Vec::new(), single_service: true };
    }
    let mut between = vec![0usize; p.k * p.k];
    for e in g.edges() {
        let (a, b) = (p.labels[e.caller], p.labels[e.callee]);
        if a != b {
            between[a.min(b) * p.k + a.max(b)] += 1;
        }
    }
    let mut pairs = Vec::with_capacity(p.k * (p.k - 1) / 2);
    for i in 0..p.k {
        for j in i + 1..p.k {
            let edges = between[i * p.k + j];
            let value = edges as f64 / (2 * p.sizes[i] * p.sizes[j]) as f64;
            pairs.push(PairCoupling { i, j, edges, value });
        }
    }
    let value = pairs.iter().map(|c| c.value).sum::<f64>() * 2.0 / (p.k * (p.k - 1)) as f64;
    Coupling { value, pairs, single_service: false }
}

/// Cohesion minus coupling; the lone service's cohesion when `k = 1`.
pub fn mq(g: &CallGraph, d: &Decomposition) -> f64 {
    let ch = cohesion(g, d);
    if ch.per_service.len() == 1 {
        ch.per_service[0]
    } else {
        ch.value - coupling(g, d).value
    }
}

/// Log-damped share of call weight crossing service boundaries. Each edge
/// contributes `ln(inv) + 1`.
pub fn icp(g: &CallGraph, d: &Decomposition) -> f64 {
    check_sizes(g, d);
    let p = Partition::of(d);
    if p.k < 2 {
        return 0.0;
    }
    let (mut cross, mut total) = (0.0, 0.0);
    for e in g.edges() {
        let w = (e.count as f64).ln() + 1.0;
        total += w;
        if p.labels[e.caller] != p.labels[e.callee] {
            cross += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        cross / total
    }
}

/// Per-service interface sets: methods called from another service.
pub(crate) fn interfaces(g: &CallGraph, p: &Partition) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); p.k];
    for e in g.edges() {
        let callee_service = p.labels[e.callee];
        if p.labels[e.caller] != callee_service {
            out[callee_service].insert(e.callee);
        }
    }
    out
}

/// Mean number of externally invoked methods per service.
pub fn ifn(g: &CallGraph, d: &Decomposition) -> f64 {
    check_sizes(g, d);
    let p = Partition::of(d);
    if p.k == 0 {
        return 0.0;
    }
    let total: usize = interfaces(g, &p).iter().map(BTreeSet::len).sum();
    total as f64 / p.k as f64
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub(crate) fn check_sizes(g: &CallGraph, d: &Decomposition) {
    assert_eq!(g.len(), d.len(), "decomposition must assign every method of the graph");
}
