mod common;

use catnet::graph::{condensation, gen_erdos_renyi, kahn_order, tarjan_scc, to_pointed, GraphError};
use catnet_oracles::{all_topological_orders, mutual_reach_components};
use common::{build, digraphs, usize_pairs};
use proptest::prelude::*;

fn check_scc(n: u32, pairs: &[(u32, u32)]) {
    let g = build(n, pairs);
    let comps = tarjan_scc(&g);
    let mut got: Vec<Vec<usize>> = comps.iter().map(|c| c.iter().map(|&v| v as usize).collect()).collect();
    got.sort();
    assert_eq!(got, mutual_reach_components(n as usize, &usize_pairs(pairs)), "{pairs:?}");
    let c = condensation(&g);
    for &(u, v) in pairs {
        assert!(c.component_of[&u] <= c.component_of[&v]);
    }
    assert!(kahn_order(&c.graph).is_ok());
}

#[test]
fn scc_matches_reachability_on_all_small_digraphs() {
    for n in 1..=4 {
        for pairs in digraphs(n) {
            check_scc(n, &pairs);
        }
    }
}

#[test]
fn kahn_is_least_topological_order() {
    for n in 1..=4 {
        for pairs in digraphs(n) {
            let orders = all_topological_orders(n as usize, &usize_pairs(&pairs));
            match kahn_order(&build(n, &pairs)) {
                Ok(o) => {
                    let o: Vec<usize> = o.iter().map(|&v| v as usize).collect();
                    assert_eq!(Some(&o), orders.iter().min());
                }
                Err(e) => {
                    assert_eq!(e, GraphError::CycleDetected);
                    assert!(orders.is_empty());
                }
            }
        }
    }
}

#[test]
fn pointed_graph_adds_isolated_loop() {
    let g = build(3, &[(0, 1), (1, 2)]);
    let p = to_pointed(&g);
    assert_eq!((p.star_vertex, p.star_edge), (3, 2));
    assert_eq!(p.network(), g);
    assert!(p.base.in_edges(3).all(|e| e.src == 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scc_on_random_graphs(n in 1u32..9, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = gen_erdos_renyi(n, p, seed).unwrap();
        let pairs: Vec<(u32, u32)> = g.edges().iter().map(|e| (e.src, e.tgt)).collect();
        check_scc(n, &pairs);
    }

    #[test]
    fn er_is_simple_and_seeded(n in 1u32..20, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = gen_erdos_renyi(n, p, seed).unwrap();
        prop_assert!(a.is_simple());
        prop_assert_eq!(a, gen_erdos_renyi(n, p, seed).unwrap());
    }
}
