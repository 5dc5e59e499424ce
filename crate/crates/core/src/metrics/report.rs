use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::alignment::{abcp, bcp_with, di_with, CapabilityWeighting};
use super::structural::{cohesion, coupling, icp, interfaces};
use super::{Decomposition, Partition};
use crate::graph::CallGraph;

/// Column layout of [`MetricsReport::table_row`].
pub const TABLE_HEADER: &str = "label\tmq\tabcp\ticp\tifn\tservices\tcohesion\tcoupling\tbcp\tdi";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceDetail {
    pub index: usize,
    pub size: usize,
    pub intra_edges: usize,
    pub cohesion: f64,
    /// Normalized capability entropy used by BCP.
    pub capability_entropy: f64,
    /// Methods of this service called from other services.
    pub interfaces: Vec<String>,
    /// Capability → number of member methods (shared methods count once per capability).
    pub capabilities: BTreeMap<String, usize>,
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    /// `k = 1`, coupling undefined and reported as 0.
    pub single_service: bool,
    /// Services without any capability label (counted with entropy 1 in BCP).
    pub unlabeled_services: Vec<usize>,
    /// Capabilities with no method (skipped by DI).
    pub empty_capabilities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mq: f64,
    pub abcp: f64,
    pub icp: f64,
    pub ifn: f64,
    pub services: usize,
    pub cohesion: f64,
    pub coupling: f64,
    pub bcp: f64,
    pub di: f64,
    pub weighting: CapabilityWeighting,
    pub flags: ReportFlags,
    pub per_service: Vec<ServiceDetail>,
}

pub fn evaluate(g: &CallGraph, d: &Decomposition) -> MetricsReport {
    evaluate_with(g, d, CapabilityWeighting::Membership)
}

pub fn evaluate_with(g: &CallGraph, d: &Decomposition, weighting: CapabilityWeighting) -> MetricsReport {
    let p = Partition::of(d);
    let ch = cohesion(g, d);
    let cp = coupling(g, d);
    let bcp = bcp_with(g, d, weighting);
    let di = di_with(g, d, weighting);
    let exposed = interfaces(g, &p);

    let mq = if p.k == 1 { ch.per_service[0] } else { ch.value - cp.value };
    let ifn = if p.k == 0 {
        0.0
    } else {
        exposed.iter().map(|s| s.len()).sum::<usize>() as f64 / p.k as f64
    };

    let mut per_service: Vec<ServiceDetail> = (0..p.k)
        .map(|s| ServiceDetail {
            index: s,
            size: p.sizes[s],
            intra_edges: ch.intra_edges[s],
            cohesion: ch.per_service[s],
            capability_entropy: bcp.entropies[s],
            interfaces: exposed[s].iter().map(|&m| g.methods()[m].clone()).collect(),
            capabilities: BTreeMap::new(),
            methods: Vec::new(),
        })
        .collect();
    for (m, &s) in p.labels.iter().enumerate() {
        per_service[s].methods.push(g.methods()[m].clone());
        for &c in g.method_caps(m) {
            *per_service[s].capabilities.entry(g.capabilities()[c].clone()).or_default() += 1;
        }
    }

    MetricsReport {
        mq,
        abcp: abcp(bcp.value, di.value),
        icp: icp(g, d),
        ifn,
        services: p.k,
        cohesion: ch.value,
        coupling: cp.value,
        bcp: bcp.value,
        di: di.value,
        weighting,
        flags: ReportFlags {
            single_service: cp.single_service,
            unlabeled_services: bcp.flagged,
            empty_capabilities: di.flagged.iter().map(|&c| g.capabilities()[c].clone()).collect(),
        },
        per_service,
    }
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One tab-separated line matching [`TABLE_HEADER`].
    pub fn table_row(&self, label: &str) -> String {
        format!(
            "{label}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            self.mq, self.abcp, self.icp, self.ifn, self.services, self.cohesion, self.coupling, self.bcp, self.di
        )
    }
}
