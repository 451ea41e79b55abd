use std::collections::{BTreeMap, BTreeSet};

use catnet::codes::{gen_bernoulli_code, WeightedCode};
use catnet::graph::{gen_erdos_renyi, to_pointed};
use catnet::hopfield::{equalizer_instance, Variant};
use catnet::netfunctors::{
    inclusion_exclusion_check, CodeCarrier, DimCarrier, Endpoint, Subgraph, SummingFunctor, SystemCarrier,
};
use catnet::transitions::single_transition;
use proptest::prelude::*;

fn code_functor(seed: u64) -> SummingFunctor<CodeCarrier> {
    let g = to_pointed(&gen_erdos_renyi(5, 0.4, seed).unwrap());
    let gens: BTreeMap<_, _> = g
        .network_edges()
        .iter()
        .map(|e| {
            let c = gen_bernoulli_code(4, 2, 0.5, seed * 31 + u64::from(e.id)).unwrap();
            let w = 0.5 + f64::from(e.id);
            (e.id, WeightedCode::uniform(c, w))
        })
        .collect();
    SummingFunctor::new(g, CodeCarrier { n: 4, q: 2 }, gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn additive_on_disjoint_edge_sets(seed in 0u64..500, mask in any::<u64>()) {
        let phi = code_functor(seed);
        let all: Vec<u32> = phi.network().base.edges().iter().map(|e| e.id).collect();
        let (a, b): (BTreeSet<u32>, BTreeSet<u32>) = all.iter().partition(|&&e| mask >> (e % 64) & 1 == 1);
        let whole = phi.eval(&all.iter().copied().collect()).unwrap();
        let sum = catnet::codes::wedge_sum_weighted(&phi.eval(&a).unwrap(), &phi.eval(&b).unwrap()).unwrap();
        prop_assert!(whole.equivalent(&sum, 1e-12));
    }

    #[test]
    fn pushforwards_sum_preimages(seed in 0u64..500) {
        let phi = code_functor(seed);
        for which in [Endpoint::Source, Endpoint::Target] {
            let psi = phi.pushforward(which).unwrap();
            for v in phi.network().network_vertices() {
                let direct: BTreeSet<u32> = phi
                    .network()
                    .base
                    .edges()
                    .iter()
                    .filter(|e| if which == Endpoint::Source { e.src == v } else { e.tgt == v })
                    .map(|e| e.id)
                    .collect();
                prop_assert!(psi.generator(v).equivalent(&phi.eval(&direct).unwrap(), 0.0));
            }
        }
    }
}

#[test]
fn conservation_instances_are_in_the_equalizer() {
    for seed in 0..30 {
        let g = gen_erdos_renyi(5, 0.5, seed).unwrap();
        let (sys, init) = equalizer_instance(&g, Variant::SelfTerm, seed).unwrap();
        assert!(sys.functor(init).unwrap().is_in_equalizer(1e-12).unwrap().holds);
    }
    let chain = to_pointed(&catnet::graph::DiGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap());
    let c = WeightedCode::uniform(gen_bernoulli_code(2, 1, 0.9, 1).unwrap(), 1.0);
    let phi = SummingFunctor::new(chain, CodeCarrier { n: 2, q: 2 }, [(0, c.clone()), (1, c)].into()).unwrap();
    let rep = phi.is_in_equalizer(1e-12).unwrap();
    assert_eq!(rep.violations, vec![0, 2]);
}

#[test]
fn transition_systems_sum_by_coproduct() {
    let g = to_pointed(&catnet::graph::DiGraph::from_pairs(2, &[(0, 1), (1, 0)]).unwrap());
    let phi = SummingFunctor::new(g, SystemCarrier, [(0, single_transition("a")), (1, single_transition("b"))].into())
        .unwrap();
    let both = phi.eval(&[0, 1].into()).unwrap();
    assert_eq!(both.n_states(), 3);
    assert!(!phi.is_in_equalizer(0.0).unwrap().holds);
}

#[test]
fn dimensions_satisfy_inclusion_exclusion() {
    let g = to_pointed(&gen_erdos_renyi(6, 0.5, 4).unwrap());
    let dims: BTreeMap<u32, u64> = g.network_edges().iter().map(|e| (e.id, u64::from(e.id % 3 + 1))).collect();
    let phi = SummingFunctor::new(g.clone(), DimCarrier, dims.clone()).unwrap();
    let assign = |s: &Subgraph| -> Option<u64> {
        let vdim = s.vertices.len() as u64;
        Some(vdim + phi.eval(&s.edges).ok()?)
    };
    let edges: Vec<u32> = dims.keys().copied().collect();
    for k in 0..edges.len() {
        let g1 = Subgraph { vertices: (0..3).collect(), edges: edges[..k].iter().copied().collect() };
        let g2 = Subgraph { vertices: (2..6).collect(), edges: edges[k / 2..].iter().copied().collect() };
        assert!(inclusion_exclusion_check(&assign, &g1, &g2).unwrap());
    }
}
