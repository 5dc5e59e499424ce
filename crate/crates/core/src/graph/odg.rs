//! Call reconstruction and per-capability operation dependency graphs.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};

use super::{CallGraph, GraphError};
use crate::trace::{CapabilityMap, OperationRecord, TraceBlock, TraceLog};

/// A caller → callee pair, as indices into the reconstructed record slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Call {
    pub caller: usize,
    pub callee: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reconstruction {
    pub calls: Vec<Call>,
    /// Records at the minimal stack depth of the trace.
    pub entry_points: Vec<usize>,
}

/// Rebuilds the call tree of one trace from eoi/ess ordering.
///
/// Records are visited in eoi order while keeping the chain of currently open
/// frames. A record at depth `s` closes every open frame at depth `≥ s`; its
/// caller is then the open frame at depth `s − 1`. Records at the minimal
/// depth are entry points.
pub fn reconstruct_calls<R: Borrow<OperationRecord>>(records: &[R]) -> Result<Reconstruction, GraphError> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by_key(|&i| records[i].borrow().eoi);

    let Some(min_depth) = records.iter().map(|r| r.borrow().ess).min() else {
        return Ok(Reconstruction::default());
    };

    let mut out = Reconstruction::default();
    // (depth, record index) of currently open frames, depth strictly increasing.
    let mut open: Vec<(u32, usize)> = Vec::new();
    for idx in order {
        let rec = records[idx].borrow();
        while open.last().is_some_and(|&(d, _)| d >= rec.ess) {
            open.pop();
        }
        if rec.ess == min_depth {
            out.entry_points.push(idx);
        } else {
            match open.last() {
                Some(&(d, caller)) if d + 1 == rec.ess => out.calls.push(Call { caller, callee: idx }),
                _ => {
                    return Err(GraphError::BrokenStack {
                        header_line: 0,
                        trace_id: rec.trace_id,
                        signature: rec.operation_signature.clone(),
                        depth: rec.ess,
                    })
                }
            }
        }
        open.push((rec.ess, idx));
    }
    Ok(out)
}

/// Operation dependency graph of one capability.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Odg {
    /// `None` for traces whose test case id names no capability.
    pub capability: Option<String>,
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), u64>,
    pub entry_points: BTreeSet<String>,
}

impl Odg {
    fn new(capability: Option<String>) -> Self {
        Self { capability, ..Self::default() }
    }

    fn add_block(&mut self, block: &TraceBlock) -> Result<(), GraphError> {
        for (_, records) in block.traces() {
            let rec = reconstruct_calls(&records).map_err(|e| match e {
                GraphError::BrokenStack { trace_id, signature, depth, .. } => GraphError::BrokenStack {
                    header_line: block.header_line,
                    trace_id,
                    signature,
                    depth,
                },
                other => other,
            })?;
            for r in &records {
                self.nodes.insert(r.operation_signature.clone());
            }
            for &e in &rec.entry_points {
                self.entry_points.insert(records[e].operation_signature.clone());
            }
            for call in rec.calls {
                let key = (
                    records[call.caller].operation_signature.clone(),
                    records[call.callee].operation_signature.clone(),
                );
                *self.edges.entry(key).or_default() += 1;
            }
        }
        Ok(())
    }

    pub fn total_calls(&self) -> u64 {
        self.edges.values().sum()
    }
}

/// Unions the call trees of every block whose test case names `capability`.
pub fn build_odg(log: &TraceLog, capability: &str) -> Result<Odg, GraphError> {
    let mut odg = Odg::new(Some(capability.to_string()));
    let mut found = false;
    for block in &log.blocks {
        if block.capability().ok().as_deref() == Some(capability) {
            found = true;
            odg.add_block(block)?;
        }
    }
    if !found {
        return Err(GraphError::NoTracesForCapability(capability.to_string()));
    }
    Ok(odg)
}

/// Merges ODGs into the system-wide graph. Methods are ordered
/// lexicographically; call counts are summed; each method's capability set is
/// the set of capabilities whose ODG contains it.
pub fn merge_odgs(odgs: &[Odg]) -> Result<CallGraph, GraphError> {
    if odgs.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    let methods: Vec<String> = odgs
        .iter()
        .flat_map(|o| o.nodes.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |m: &str| methods.binary_search_by(|x| x.as_str().cmp(m)).expect("node of some odg");

    let mut caps = vec![BTreeSet::new(); methods.len()];
    let mut edges = Vec::new();
    for odg in odgs {
        if let Some(cap) = &odg.capability {
            for node in &odg.nodes {
                caps[index(node)].insert(cap.clone());
            }
        }
        for ((caller, callee), &count) in &odg.edges {
            edges.push((index(caller), index(callee), count));
        }
    }
    CallGraph::new(methods, edges, caps)
}

/// Result of turning a trace log into a call graph.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub graph: CallGraph,
    pub odgs: Vec<Odg>,
    /// Blocks whose test case id did not name a capability.
    pub unlabeled_blocks: usize,
    /// Blocks holding records from more than one trace id.
    pub interleaved_blocks: usize,
}

/// Full trace-to-graph pipeline: one ODG per capability, merged, then the
/// optional capability map applied on top.
///
/// Blocks with a malformed test case id are an error unless a capability map
/// is given; with a map they still contribute calls but no capability.
pub fn analyze(log: &TraceLog, map: Option<&CapabilityMap>) -> Result<Analysis, GraphError> {
    let mut capabilities = BTreeSet::new();
    let mut unlabeled = Odg::new(None);
    let mut unlabeled_blocks = 0;
    for block in &log.blocks {
        match block.capability() {
            Ok(cap) => {
                capabilities.insert(cap);
            }
            Err(e) => {
                if map.is_none() {
                    return Err(e.into());
                }
                unlabeled_blocks += 1;
                unlabeled.add_block(block)?;
            }
        }
    }

    let mut odgs = capabilities
        .iter()
        .map(|cap| build_odg(log, cap))
        .collect::<Result<Vec<_>, _>>()?;
    if unlabeled_blocks > 0 {
        odgs.push(unlabeled);
    }

    let mut graph = merge_odgs(&odgs)?;
    if let Some(map) = map {
        graph = graph.with_capability_map(map);
    }
    Ok(Analysis {
        graph,
        odgs,
        unlabeled_blocks,
        interleaved_blocks: log.interleaved_blocks(),
    })
}
