//! Decomposition quality metrics.
//!
//! Every metric is a pure function of a [`CallGraph`] and a [`Decomposition`].
//! Empty services never count: `k` and every average range over the non-empty
//! services only.
//!
//! Structural metrics (cohesion, coupling, MQ, ICP, IFN) use the unique edge
//! set; self-calls count toward cohesion only. Alignment metrics (BCP, DI,
//! ABCP) use natural-log entropies normalized by `ln B` (BCP) or `ln k` (DI),
//! so both are base-independent and land in `[0, 100]`.

mod alignment;
mod report;
mod structural;

pub use alignment::{abcp, bcp, bcp_with, di, di_with, AlignmentDetail, CapabilityWeighting};
pub use report::{evaluate, evaluate_with, MetricsReport, ReportFlags, ServiceDetail, TABLE_HEADER};
pub use structural::{cohesion, coupling, icp, ifn, mq, Cohesion, Coupling, PairCoupling};

use serde::{Deserialize, Serialize};

/// Method → service assignment. Labels need not be contiguous; services that
/// no method uses are simply absent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decomposition {
    assignment: Vec<usize>,
}

impl Decomposition {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self { assignment }
    }

    pub fn single_service(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of methods.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Canonical labels: services numbered `0..k` by first appearance. This is
    /// the restricted-growth form, so equal partitions compare equal.
    pub fn compacted(&self) -> Self {
        Self::new(Partition::of(self).labels)
    }

    /// Number of non-empty services.
    pub fn service_count(&self) -> usize {
        Partition::of(self).k
    }

    /// Method indices of each non-empty service, in canonical order.
    pub fn services(&self) -> Vec<Vec<usize>> {
        let p = Partition::of(self);
        let mut out = vec![Vec::new(); p.k];
        for (m, &s) in p.labels.iter().enumerate() {
            out[s].push(m);
        }
        out
    }
}

/// Compacted view shared by the metric implementations.
#[derive(Debug, Clone)]
pub(crate) struct Partition {
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    pub k: usize,
}

impl Partition {
    pub fn of(d: &Decomposition) -> Self {
        let mut remap: Vec<Option<usize>> = Vec::new();
        let mut sizes = Vec::new();
        let mut labels = Vec::with_capacity(d.len());
        for &s in &d.assignment {
            if s >= remap.len() {
                remap.resize(s + 1, None);
            }
            let label = *remap[s].get_or_insert_with(|| {
                sizes.push(0);
                sizes.len() - 1
            });
            sizes[label] += 1;
            labels.push(label);
        }
        let k = sizes.len();
        Self { labels, sizes, k }
    }
}
