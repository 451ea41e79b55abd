mod common;

use std::collections::BTreeSet;

use catnet::graph::{gen_erdos_renyi, gen_erdos_renyi_undirected, gen_mlp};
use catnet::rng::seeded;
use catnet::simplicial::{
    betti, connectivity_proxy, directed_flag_complex, persistence, Field, Filtration, FlagVariant, SimplicialComplex,
};
use catnet_oracles::{betti_dense, flag_complex_brute, Coefficients};
use common::{build, digraphs, usize_pairs};
use proptest::prelude::*;
use rand::Rng;

fn as_set(k: &SimplicialComplex) -> BTreeSet<Vec<u32>> {
    k.iter().cloned().collect()
}

fn trimmed(mut b: Vec<usize>) -> Vec<usize> {
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn check_complex(k: &SimplicialComplex) {
    let raw: Vec<Vec<u32>> = k.iter().cloned().collect();
    assert_eq!(trimmed(betti(k, Field::Gf2)), trimmed(betti_dense(&raw, Coefficients::Gf2)), "{raw:?}");
    assert_eq!(trimmed(betti(k, Field::Rationals)), trimmed(betti_dense(&raw, Coefficients::Rationals)), "{raw:?}");
}

#[test]
fn battery() {
    let cases: [(u32, &[(u32, u32)], Vec<usize>); 3] = [
        (3, &[(0, 1), (1, 2), (2, 0)], vec![1, 1]),
        (3, &[(0, 1), (1, 2), (0, 2)], vec![1, 0, 0]),
        (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], vec![1, 0, 1]),
    ];
    for (i, (n, pairs, want)) in cases.iter().enumerate() {
        // the tetrahedron boundary is the 2-skeleton of the full 3-simplex
        let max_dim = if i == 2 { 2 } else { 3 };
        let k = directed_flag_complex(&build(*n, pairs), max_dim, FlagVariant::EdgePair).unwrap();
        let b = betti(&k, Field::Gf2);
        assert_eq!(&b[..want.len()], &want[..]);
        assert!(b[want.len()..].iter().all(|&x| x == 0));
        check_complex(&k);
    }
}

#[test]
fn flag_complexes_match_brute_force_on_all_small_digraphs() {
    for n in 1..=4 {
        for pairs in digraphs(n) {
            let g = build(n, &pairs);
            let e = usize_pairs(&pairs);
            let k = directed_flag_complex(&g, 3, FlagVariant::EdgePair).unwrap();
            assert_eq!(as_set(&k), flag_complex_brute(n as usize, &e, 3, false), "{pairs:?}");
            let u = directed_flag_complex(&g, 3, FlagVariant::Undirected).unwrap();
            assert_eq!(as_set(&u), flag_complex_brute(n as usize, &e, 3, true), "{pairs:?}");
            let p = directed_flag_complex(&g, 3, FlagVariant::Path).unwrap();
            assert!(p.is_subcomplex_of(&u));
            // reciprocal edges can leave an edge-pair clique without a unique source
            if !pairs.iter().any(|&(a, b)| pairs.contains(&(b, a))) {
                assert!(k.is_subcomplex_of(&p), "{pairs:?}");
            }
            check_complex(&k);
            check_complex(&u);
        }
    }
}

#[test]
fn random_complexes_up_to_seven_vertices() {
    for seed in 0..60u64 {
        let n = 5 + (seed % 3) as u32;
        let g = gen_erdos_renyi(n, 0.45, seed).unwrap();
        let pairs: Vec<(u32, u32)> = g.edges().iter().map(|e| (e.src, e.tgt)).collect();
        let k = directed_flag_complex(&g, 6, FlagVariant::EdgePair).unwrap();
        assert_eq!(as_set(&k), flag_complex_brute(n as usize, &usize_pairs(&pairs), 6, false));
        check_complex(&k);
        let u = directed_flag_complex(&gen_erdos_renyi_undirected(n, 0.6, seed).unwrap(), 6, FlagVariant::Undirected).unwrap();
        check_complex(&u);
    }
}

#[test]
fn persistence_infinite_bars_match_betti() {
    for seed in 0..50u64 {
        let mut rng = seeded(seed);
        let n = 4 + (seed % 4) as u32;
        let g = gen_erdos_renyi_undirected(n, 0.5, seed).unwrap();
        let k = directed_flag_complex(&g, 3, FlagVariant::Undirected).unwrap();
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let f = Filtration::from_fn(k.clone(), |s| s.iter().map(|&v| vals[v as usize]).fold(0.0, f64::max)).unwrap();
        let bars = persistence(&f);
        let b = betti(&k, Field::Gf2);
        for (d, &bd) in b.iter().enumerate() {
            let inf = bars.iter().filter(|x| x.dim == d && x.death.is_infinite()).count();
            assert_eq!(inf, bd, "seed {seed} dim {d}");
        }
        assert!(bars.iter().all(|x| x.death > x.birth));
    }
}

#[test]
fn feedforward_shapes_have_no_two_simplices() {
    for shape in [&[1, 1][..], &[2, 2], &[2, 3, 1], &[3, 3, 3]] {
        let k = directed_flag_complex(&gen_mlp(shape).unwrap(), 4, FlagVariant::EdgePair).unwrap();
        assert!(k.dim() <= 1, "{shape:?}");
    }
}

#[test]
fn proxy_trivial_cases() {
    let full = directed_flag_complex(&gen_erdos_renyi_undirected(6, 1.0, 0).unwrap(), 5, FlagVariant::Undirected).unwrap();
    assert!((0..=4).all(|m| connectivity_proxy(&full, m)));
    let empty = directed_flag_complex(&gen_erdos_renyi_undirected(6, 0.0, 0).unwrap(), 5, FlagVariant::Undirected).unwrap();
    assert_eq!(betti(&empty, Field::Gf2)[0], 6);
    assert!(!connectivity_proxy(&empty, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_face_closed_and_euler_matches(gens in prop::collection::vec(prop::collection::btree_set(0u32..7, 1..5), 1..6)) {
        let gens: Vec<Vec<u32>> = gens.into_iter().map(|s| s.into_iter().collect()).collect();
        let k = SimplicialComplex::closure(gens.clone());
        prop_assert_eq!(as_set(&k), catnet_oracles::face_closure(&gens));
        let b = betti(&k, Field::Gf2);
        let alt: i64 = b.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(alt, k.euler_characteristic());
    }
}
