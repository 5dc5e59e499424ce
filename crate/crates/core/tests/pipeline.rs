use std::collections::BTreeSet;

use svcsplit::graph::{analyze, CallGraph, GraphError};
use svcsplit::synthetic::{render_trace, LISTING_TRACE};
use svcsplit::trace::{parse_log, CapabilityMap};

fn calls(records: &[(&str, u32)]) -> Vec<(String, u32)> {
    records.iter().map(|(s, d)| (s.to_string(), *d)).collect()
}

fn shop_trace() -> String {
    render_trace(&[
        ("Test_Order_Checkout", calls(&[("Cart.checkout()", 1), ("Stock.reserve()", 2), ("Log.write()", 3), ("Pay.charge()", 2)])),
        ("Test_Account_Login", calls(&[("Auth.login()", 1), ("Log.write()", 2)])),
        ("Test_Order_View", calls(&[("Cart.view()", 1), ("Stock.reserve()", 2)])),
    ])
}

#[test]
fn listing_builds_three_edges() {
    let a = analyze(&parse_log(LISTING_TRACE).unwrap(), None).unwrap();
    assert_eq!(a.graph.len(), 4);
    assert_eq!(a.graph.edges().len(), 3);
    assert_eq!(a.graph.capabilities(), ["Order"]);
    let entries: Vec<&String> = a.odgs[0].entry_points.iter().collect();
    assert_eq!(entries, ["OrderActionBean.addItemToCart(java.lang.String,int)"]);
}

#[test]
fn capabilities_merge_with_shared_methods() {
    let a = analyze(&parse_log(&shop_trace()).unwrap(), None).unwrap();
    let g = &a.graph;
    assert_eq!(a.odgs.len(), 2);
    assert_eq!(g.len(), 6);
    let log = g.method_index("Log.write()").unwrap();
    assert_eq!(g.method_cap_names(log), BTreeSet::from(["Account".to_string(), "Order".to_string()]));
    assert_eq!(g.shared_methods(), 1);
    assert!((g.overlap_ratio() - 1.0 / 6.0).abs() < 1e-12);
    let stock = g.method_index("Stock.reserve()").unwrap();
    let checkout = g.method_index("Cart.checkout()").unwrap();
    assert_eq!(g.inv(checkout, stock), 1);
    assert_eq!(g.total_calls(), 5);
}

#[test]
fn block_order_does_not_change_the_graph() {
    let text = shop_trace();
    let blocks: Vec<&str> = text.split("$2;").filter(|b| !b.is_empty()).collect();
    let reversed: String = blocks.iter().rev().map(|b| format!("$2;{b}")).collect();
    let a = analyze(&parse_log(&text).unwrap(), None).unwrap().graph;
    let b = analyze(&parse_log(&reversed).unwrap(), None).unwrap().graph;
    assert_eq!(a, b);
}

#[test]
fn graph_file_round_trip() {
    let g = analyze(&parse_log(&shop_trace()).unwrap(), None).unwrap().graph;
    assert_eq!(CallGraph::from_json(&g.to_json()).unwrap(), g);
}

#[test]
fn capability_map_overrides_and_rescues_bad_ids() {
    let text = render_trace(&[("smoke-test", calls(&[("A.run()", 1), ("B.help()", 2)]))]);
    let log = parse_log(&text).unwrap();
    assert!(matches!(analyze(&log, None), Err(GraphError::Trace(_))));
    let map = CapabilityMap::parse("method_signature,capability\nA.run(),Billing\n").unwrap();
    let a = analyze(&log, Some(&map)).unwrap();
    assert_eq!(a.unlabeled_blocks, 1);
    assert_eq!(a.graph.method_cap_names(a.graph.method_index("A.run()").unwrap()), BTreeSet::from(["Billing".to_string()]));
    assert!(a.graph.method_cap_names(a.graph.method_index("B.help()").unwrap()).is_empty());
}
