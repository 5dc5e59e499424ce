//! Synthetic call graphs and traces with known structure.
//!
//! Used by the test suites, the acceptance harness and the CLI demos. All
//! generators are deterministic in their seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::CallGraph;
use crate::metrics::Decomposition;

/// The order-capability trace excerpt used throughout the docs: one test case
/// calling four methods.
pub const LISTING_TRACE: &str = "\
$2;1753777000000000001;Test_Order_AddItemToCart
$1;1753777000000001201;OrderActionBean.addItemToCart(java.lang.String,int);<no-session-id>;2499076000000000001;1753777000000001101;1753777000000001400;localhost;2;1
$1;1753777000000002202;AccountService.getCartByUser(java.lang.String);<no-session-id>;2499076000000000001;1753777000000001210;1753777000000001290;localhost;3;2
$1;1753777000000003203;OrderService.addItemToCart(model.Cart,jva.lang.String,int);<no-session-id>;2499076000000000001;1753777000000001230;1753777000000001275;localhost;4;3
$1;1753777000000004204;OrderActionBean.setQuantity(int);<no-session-id>;2499076000000000001;1753777000000001500;1753777000000001550;localhost;5;2
";

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph over `n` methods. Every ordered pair (self-pairs included)
/// gets an edge with probability `edge_prob` and a count in `1..=5`. Each
/// method gets one of `n_caps` capabilities, plus a second one with
/// probability 0.2.
pub fn random_graph(n: usize, edge_prob: f64, n_caps: usize, seed: u64) -> CallGraph {
    let mut rng = rng(seed);
    let methods = (0..n).map(|i| format!("Svc{}.op{i}()", i % 3)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(edge_prob) {
                edges.push((a, b, rng.random_range(1..=5)));
            }
        }
    }
    let caps = (0..n)
        .map(|_| {
            let mut set = BTreeSet::new();
            set.insert(format!("Cap{}", rng.random_range(0..n_caps)));
            if n_caps > 1 && rng.random_bool(0.2) {
                set.insert(format!("Cap{}", rng.random_range(0..n_caps)));
            }
            set
        })
        .collect();
    CallGraph::new(methods, edges, caps).expect("valid random graph")
}

/// Graph with one group of methods per capability and calls only inside
/// groups. Each group is a chain `m0 → m1 → …` plus extra intra-group edges
/// with probability `density`. Returns the graph and the planted partition.
pub fn planted_graph(group_sizes: &[usize], density: f64, seed: u64) -> (CallGraph, Decomposition) {
    let mut rng = rng(seed);
    let mut methods = Vec::new();
    let mut caps = Vec::new();
    let mut planted = Vec::new();
    let mut edges = Vec::new();
    for (g, &size) in group_sizes.iter().enumerate() {
        let base = methods.len();
        for i in 0..size {
            methods.push(format!("Cap{g}Service.op{i:02}()"));
            caps.push(BTreeSet::from([format!("Cap{g}")]));
            planted.push(g);
        }
        for i in 0..size {
            for j in 0..size {
                let chain = j == i + 1;
                if i != j && (chain || rng.random_bool(density)) {
                    edges.push((base + i, base + j, rng.random_range(1..=4)));
                }
            }
        }
    }
    let graph = CallGraph::new(methods, edges, caps).expect("valid planted graph");
    (graph, Decomposition::new(planted))
}

/// A planted graph made tangled: a `shared_fraction` of methods also belong to
/// a second capability, and each such shared method calls into (and is
/// called from) that other capability's group.
pub fn tangled_graph(group_sizes: &[usize], density: f64, shared_fraction: f64, seed: u64) -> CallGraph {
    let (planted, partition) = planted_graph(group_sizes, density, seed);
    let mut rng = rng(seed ^ 0x5eed);
    let n = planted.len();
    let groups = group_sizes.len();
    let shared = ((n as f64) * shared_fraction).ceil() as usize;

    let mut caps: Vec<BTreeSet<String>> = (0..n).map(|m| planted.method_cap_names(m)).collect();
    let mut edges: Vec<(usize, usize, u64)> = planted.edges().iter().map(|e| (e.caller, e.callee, e.count)).collect();
    let members = |g: usize| -> Vec<usize> { (0..n).filter(|&m| partition.assignment()[m] == g).collect() };

    let mut order: Vec<usize> = (0..n).collect();
    // Deterministic shuffle.
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for &m in order.iter().take(shared) {
        let home = partition.assignment()[m];
        let other = (home + 1 + rng.random_range(0..groups - 1)) % groups;
        caps[m].insert(format!("Cap{other}"));
        let targets = members(other);
        for _ in 0..2 {
            let t = targets[rng.random_range(0..targets.len())];
            edges.push((m, t, rng.random_range(1..=4)));
            edges.push((t, m, 1));
        }
    }
    CallGraph::new(planted.methods().to_vec(), edges, caps).expect("valid tangled graph")
}

/// Twenty methods over Order (7), Account (7) and Payment (6), with a few
/// cross-capability calls.
pub fn ecommerce_graph() -> (CallGraph, Decomposition) {
    let (base, planted) = planted_graph(&[7, 7, 6], 0.35, 2024);
    let names = ["Order", "Account", "Payment"];
    let methods: Vec<String> = (0..base.len())
        .map(|m| {
            let g = planted.assignment()[m];
            base.methods()[m].replace(&format!("Cap{g}"), names[g])
        })
        .collect();
    let caps = (0..base.len())
        .map(|m| BTreeSet::from([names[planted.assignment()[m]].to_string()]))
        .collect();
    let mut edges: Vec<_> = base.edges().iter().map(|e| (e.caller, e.callee, e.count)).collect();
    // Order → Account lookup and Order → Payment checkout.
    edges.push((0, 7, 3));
    edges.push((1, 14, 1));
    let g = CallGraph::new(methods, edges, caps).expect("valid fixture");
    (g, planted)
}

/// Renders call trees as a trace log. Each block is a test case id and its
/// records as `(signature, stack depth)` in execution order.
pub fn render_trace(blocks: &[(&str, Vec<(String, u32)>)]) -> String {
    let mut out = String::new();
    let mut ts: u64 = 1_700_000_000_000_000_000;
    for (b, (test_case, records)) in blocks.iter().enumerate() {
        ts += 1;
        out.push_str(&format!("$2;{ts};{test_case}\n"));
        let trace_id = 1000 + b as u64;
        for (eoi, (sig, depth)) in records.iter().enumerate() {
            ts += 10;
            out.push_str(&format!(
                "$1;{ts};{sig};<no-session-id>;{trace_id};{};{};localhost;{eoi};{depth}\n",
                ts - 5,
                ts
            ));
        }
    }
    out
}
