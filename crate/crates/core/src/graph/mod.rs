//! Runtime call graphs.
//!
//! [`CallGraph`] is the system-wide dependency matrix: `inv(k, l)` counts the
//! runtime calls from method `k` to method `l`. It is stored sparsely as a
//! sorted edge list since real systems have far fewer edges than `N²`.

mod interchange;
mod odg;

pub use interchange::GraphFile;
pub use odg::{analyze, build_odg, merge_odgs, reconstruct_calls, Analysis, Call, Odg, Reconstruction};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::trace::{CapabilityMap, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("trace {trace_id} (block at line {header_line}): {signature} at depth {depth} has no caller at depth {}", depth - 1)]
    BrokenStack {
        header_line: usize,
        trace_id: u64,
        signature: String,
        depth: u32,
    },
    #[error("no traces for capability {0:?}")]
    NoTracesForCapability(String),
    #[error("nothing to merge")]
    EmptyInput,
    #[error("duplicate method {0:?}")]
    DuplicateMethod(String),
    #[error("edge ({caller}, {callee}) references a method index outside 0..{n}")]
    EdgeOutOfRange { caller: usize, callee: usize, n: usize },
    #[error("capabilities listed for unknown method {0:?}")]
    UnknownMethod(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("invalid graph file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub caller: usize,
    pub callee: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallGraph {
    methods: Vec<String>,
    edges: Vec<Edge>,
    capabilities: Vec<String>,
    method_caps: Vec<Vec<usize>>,
}

impl CallGraph {
    /// Builds a graph from method names, `(caller, callee, count)` triples and
    /// one capability set per method. Zero counts are dropped and repeated
    /// pairs are summed.
    pub fn new<E>(methods: Vec<String>, edges: E, caps: Vec<BTreeSet<String>>) -> Result<Self, GraphError>
    where
        E: IntoIterator<Item = (usize, usize, u64)>,
    {
        let n = methods.len();
        let mut seen = BTreeSet::new();
        for m in &methods {
            if !seen.insert(m.as_str()) {
                return Err(GraphError::DuplicateMethod(m.clone()));
            }
        }
        assert_eq!(caps.len(), n, "one capability set per method");

        let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (caller, callee, count) in edges {
            if caller >= n || callee >= n {
                return Err(GraphError::EdgeOutOfRange { caller, callee, n });
            }
            if count > 0 {
                *counts.entry((caller, callee)).or_default() += count;
            }
        }
        let edges = counts
            .into_iter()
            .map(|((caller, callee), count)| Edge { caller, callee, count })
            .collect();

        let capabilities: Vec<String> = caps.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let method_caps = caps
            .iter()
            .map(|set| {
                set.iter()
                    .map(|c| capabilities.binary_search(c).expect("collected above"))
                    .collect()
            })
            .collect();

        Ok(Self { methods, edges, capabilities, method_caps })
    }

    /// Convenience constructor from a dense `inv` matrix.
    pub fn from_dense(methods: Vec<String>, inv: &[Vec<u64>], caps: Vec<BTreeSet<String>>) -> Result<Self, GraphError> {
        let edges = inv
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().map(move |(l, &c)| (k, l, c)));
        Self::new(methods, edges, caps)
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn method_index(&self, signature: &str) -> Option<usize> {
        self.methods.iter().position(|m| m == signature)
    }

    /// Unique directed edges with positive counts, sorted by `(caller, callee)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Runtime call count from `caller` to `callee`.
    pub fn inv(&self, caller: usize, callee: usize) -> u64 {
        self.edges
            .binary_search_by(|e| (e.caller, e.callee).cmp(&(caller, callee)))
            .map(|i| self.edges[i].count)
            .unwrap_or(0)
    }

    pub fn total_calls(&self) -> u64 {
        self.edges.iter().map(|e| e.count).sum()
    }

    /// Sorted capability names (`B` of them).
    pub fn capabilities(&self) -> &[String] {
        &self.capabilities
    }

    /// Capability indices of a method, sorted.
    pub fn method_caps(&self, method: usize) -> &[usize] {
        &self.method_caps[method]
    }

    pub fn method_cap_names(&self, method: usize) -> BTreeSet<String> {
        self.method_caps[method].iter().map(|&c| self.capabilities[c].clone()).collect()
    }

    /// Replaces the capability set of every method listed in `map`.
    pub fn with_capability_map(&self, map: &CapabilityMap) -> Self {
        let caps = (0..self.len())
            .map(|m| match map.get(&self.methods[m]) {
                Some(set) => set.clone(),
                None => self.method_cap_names(m),
            })
            .collect();
        let edges = self.edges.iter().map(|e| (e.caller, e.callee, e.count));
        Self::new(self.methods.clone(), edges, caps).expect("same methods and edges")
    }

    /// Methods belonging to two or more capabilities.
    pub fn shared_methods(&self) -> usize {
        self.method_caps.iter().filter(|c| c.len() >= 2).count()
    }

    /// Fraction of methods shared across capabilities; 0 for an empty graph.
    pub fn overlap_ratio(&self) -> f64 {
        overlap_ratio(self)
    }

    /// Relabels methods: method `i` of the result is method `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len());
        let mut new_index = vec![0; self.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let methods = order.iter().map(|&o| self.methods[o].clone()).collect();
        let caps = order.iter().map(|&o| self.method_cap_names(o)).collect();
        let edges = self.edges.iter().map(|e| (new_index[e.caller], new_index[e.callee], e.count));
        Self::new(methods, edges, caps).expect("permutation of a valid graph")
    }

    /// Graphviz rendering; edge labels are call counts.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph calls {\n");
        for (i, m) in self.methods.iter().enumerate() {
            out.push_str(&format!("  n{i} [label={:?}];\n", m));
        }
        for e in &self.edges {
            out.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", e.caller, e.callee, e.count));
        }
        out.push_str("}\n");
        out
    }
}

/// `|{m : |caps(m)| ≥ 2}| / N`.
pub fn overlap_ratio(g: &CallGraph) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    g.shared_methods() as f64 / g.len() as f64
}
