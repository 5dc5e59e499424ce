//! Business-capability alignment: BCP, DI and their average ABCP.
//!
//! BCP looks inside each service: how mixed are the capabilities of its
//! methods? DI looks at each capability: how scattered is it across services?

use serde::{Deserialize, Serialize};

use super::structural::check_sizes;
use super::{Decomposition, Partition};
use crate::graph::CallGraph;

/// How a method shared by several capabilities is counted in histograms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapabilityWeighting {
    /// One full count per capability the method belongs to.
    #[default]
    Membership,
    /// `1 / |caps(m)|` per capability, so every method weighs 1 in total.
    Fractional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentDetail {
    /// Score in `[0, 100]`.
    pub value: f64,
    /// Normalized entropy per service (BCP) or per capability (DI).
    pub entropies: Vec<f64>,
    /// BCP: services with no labeled method (entropy 1).
    /// DI: capabilities with no method (skipped).
    pub flagged: Vec<usize>,
}

/// Shannon entropy of `weights` (natural log) divided by `ln(outcomes)`.
/// Zero when there is at most one possible outcome.
fn normalized_entropy(weights: &[f64], outcomes: usize) -> f64 {
    if outcomes <= 1 {
        return 0.0;
    }
    let total: f64 = weights.iter().sum();
    let h: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.ln()
        })
        .sum();
    (h / (outcomes as f64).ln()).clamp(0.0, 1.0)
}

fn method_weight(g: &CallGraph, m: usize, weighting: CapabilityWeighting) -> f64 {
    match weighting {
        CapabilityWeighting::Membership => 1.0,
        CapabilityWeighting::Fractional => 1.0 / g.method_caps(m).len() as f64,
    }
}

/// `(1 − mean_i H(i)) × 100` with `H(i)` the normalized capability entropy of service `i`.
pub fn bcp_with(g: &CallGraph, d: &Decomposition, weighting: CapabilityWeighting) -> AlignmentDetail {
    check_sizes(g, d);
    let p = Partition::of(d);
    let b = g.capabilities().len();
    let mut hist = vec![vec![0.0; b]; p.k];
    for (m, &s) in p.labels.iter().enumerate() {
        for &c in g.method_caps(m) {
            hist[s][c] += method_weight(g, m, weighting);
        }
    }
    let mut flagged = Vec::new();
    let entropies: Vec<f64> = hist
        .iter()
        .enumerate()
        .map(|(s, h)| {
            if h.iter().all(|&w| w == 0.0) {
                flagged.push(s);
                1.0
            } else {
                normalized_entropy(h, b)
            }
        })
        .collect();
    let value = score(&entropies);
    AlignmentDetail { value, entropies, flagged }
}

/// `(1 − mean_b H(b)) × 100` with `H(b)` the normalized entropy of capability
/// `b`'s spread over the `k` services. Capabilities without methods are skipped.
pub fn di_with(g: &CallGraph, d: &Decomposition, weighting: CapabilityWeighting) -> AlignmentDetail {
    check_sizes(g, d);
    let p = Partition::of(d);
    let b = g.capabilities().len();
    let mut spread = vec![vec![0.0; p.k]; b];
    for (m, &s) in p.labels.iter().enumerate() {
        for &c in g.method_caps(m) {
            spread[c][s] += method_weight(g, m, weighting);
        }
    }
    let mut flagged = Vec::new();
    let mut entropies = Vec::with_capacity(b);
    for (c, row) in spread.iter().enumerate() {
        if row.iter().all(|&w| w == 0.0) {
            flagged.push(c);
        } else {
            entropies.push(normalized_entropy(row, p.k));
        }
    }
    // No labeled capability at all: nothing is aligned.
    let value = if entropies.is_empty() { 0.0 } else { score(&entropies) };
    AlignmentDetail { value, entropies, flagged }
}

fn score(entropies: &[f64]) -> f64 {
    if entropies.is_empty() {
        return 0.0;
    }
    (1.0 - entropies.iter().sum::<f64>() / entropies.len() as f64) * 100.0
}

pub fn bcp(g: &CallGraph, d: &Decomposition) -> f64 {
    bcp_with(g, d, CapabilityWeighting::Membership).value
}

pub fn di(g: &CallGraph, d: &Decomposition) -> f64 {
    di_with(g, d, CapabilityWeighting::Membership).value
}

/// Equal-weight average of BCP and DI.
pub fn abcp(bcp: f64, di: f64) -> f64 {
    0.5 * bcp + 0.5 * di
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(caps: &[&[&str]]) -> CallGraph {
        let methods = (0..caps.len()).map(|i| format!("m{i}")).collect();
        let sets = caps.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect();
        CallGraph::new(methods, [], sets).unwrap()
    }

    fn d(a: &[usize]) -> Decomposition {
        Decomposition::new(a.to_vec())
    }

    /// Order ×7, Account ×7, Payment ×6.
    fn ecommerce() -> CallGraph {
        let mut caps: Vec<&[&str]> = vec![&["Order"]; 7];
        caps.extend(vec![&["Account"] as &[&str]; 7]);
        caps.extend(vec![&["Payment"] as &[&str]; 6]);
        labeled(&caps)
    }

    #[test]
    fn pure_services_score_100() {
        let g = ecommerce();
        let mut a = vec![0; 7];
        a.extend([1; 7]);
        a.extend([2; 6]);
        let dec = d(&a);
        assert_eq!(bcp(&g, &dec), 100.0);
        assert_eq!(di(&g, &dec), 100.0);
    }

    #[test]
    fn fragmented_order_keeps_bcp_but_loses_di() {
        let g = ecommerce();
        // Order split 4/3 over two services.
        let mut a = vec![0, 0, 0, 0, 3, 3, 3];
        a.extend([1; 7]);
        a.extend([2; 6]);
        let dec = d(&a);
        assert_eq!(bcp(&g, &dec), 100.0);
        let di_value = di(&g, &dec);
        // H(Order) = −(4/7 ln 4/7 + 3/7 ln 3/7) / ln 4, other capabilities 0.
        let (p, q) = (4.0f64 / 7.0, 3.0f64 / 7.0);
        let h = -(p * p.ln() + q * q.ln()) / 4f64.ln();
        assert!((di_value - (1.0 - h / 3.0) * 100.0).abs() < 1e-9);
        assert!(abcp(bcp(&g, &dec), di_value) < 100.0);
    }

    #[test]
    fn even_mix_has_zero_bcp() {
        let g = labeled(&[&["A"], &["B"]]);
        assert!((bcp(&g, &d(&[0, 0])) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn even_split_has_zero_di() {
        let g = labeled(&[&["A"], &["A"]]);
        assert!((di(&g, &d(&[0, 1])) - 0.0).abs() < 1e-12);
        assert_eq!(di(&g, &d(&[0, 0])), 100.0);
    }

    #[test]
    fn single_capability_means_zero_entropy() {
        let g = labeled(&[&["A"], &["A"], &["A"]]);
        assert_eq!(bcp(&g, &d(&[0, 1, 1])), 100.0);
    }

    #[test]
    fn unlabeled_service_is_flagged() {
        let g = labeled(&[&["A"], &[], &["B"]]);
        let detail = bcp_with(&g, &d(&[0, 1, 2]), CapabilityWeighting::Membership);
        assert_eq!(detail.flagged, [1]);
        assert!((detail.value - 100.0 * 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(di(&labeled(&[&[], &[]]), &d(&[0, 1])), 0.0);
    }

    #[test]
    fn fractional_weighting_counts_shared_methods_once() {
        let g = labeled(&[&["A", "B"], &["A"]]);
        let membership = bcp_with(&g, &d(&[0, 0]), CapabilityWeighting::Membership);
        let fractional = bcp_with(&g, &d(&[0, 0]), CapabilityWeighting::Fractional);
        // Histograms [2, 1] versus [1.5, 0.5].
        let h = |p: f64| -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / 2f64.ln();
        assert!((membership.value - (1.0 - h(2.0 / 3.0)) * 100.0).abs() < 1e-12);
        assert!((fractional.value - (1.0 - h(0.75)) * 100.0).abs() < 1e-12);
    }

    #[test]
    fn abcp_is_symmetric_average() {
        assert_eq!(abcp(100.0, 100.0), 100.0);
        assert_eq!(abcp(100.0, 0.0), 50.0);
        assert_eq!(abcp(12.5, 80.0), abcp(80.0, 12.5));
    }
}
