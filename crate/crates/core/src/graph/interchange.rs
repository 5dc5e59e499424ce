//! JSON interchange format for call graphs.
//!
//! ```json
//! {
//!   "methods": ["A.f()", "B.g(int)"],
//!   "edges": [[0, 1, 3]],
//!   "capabilities": {"A.f()": ["Order"], "B.g(int)": ["Order", "Account"]}
//! }
//! ```
//!
//! `edges` holds `[caller_index, callee_index, call_count]` triples. Methods
//! missing from `capabilities` have no capability.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CallGraph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub methods: Vec<String>,
    pub edges: Vec<[u64; 3]>,
    #[serde(default)]
    pub capabilities: BTreeMap<String, Vec<String>>,
}

impl From<&CallGraph> for GraphFile {
    fn from(g: &CallGraph) -> Self {
        let capabilities = (0..g.len())
            .filter(|&m| !g.method_caps(m).is_empty())
            .map(|m| (g.methods()[m].clone(), g.method_cap_names(m).into_iter().collect()))
            .collect();
        Self {
            methods: g.methods().to_vec(),
            edges: g.edges().iter().map(|e| [e.caller as u64, e.callee as u64, e.count]).collect(),
            capabilities,
        }
    }
}

impl TryFrom<GraphFile> for CallGraph {
    type Error = GraphError;

    fn try_from(file: GraphFile) -> Result<Self, GraphError> {
        let mut caps = vec![BTreeSet::new(); file.methods.len()];
        for (method, names) in file.capabilities {
            let idx = file
                .methods
                .iter()
                .position(|m| *m == method)
                .ok_or(GraphError::UnknownMethod(method))?;
            caps[idx].extend(names);
        }
        let to_index = |v: u64| usize::try_from(v).unwrap_or(usize::MAX);
        let edges = file.edges.iter().map(|&[c, l, count]| (to_index(c), to_index(l), count));
        // Out-of-range indices are rejected by CallGraph::new.
        CallGraph::new(file.methods, edges, caps)
    }
}

impl CallGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from(self)).expect("graph file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        file.try_into()
    }
}
