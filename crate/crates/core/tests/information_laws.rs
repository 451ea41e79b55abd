use catnet::codes::gen_bernoulli_code;
use catnet::graph::gen_erdos_renyi;
use catnet::information::{
    coboundary1, coboundary_squared, code_to_outcomes, entropy, entropy_cochain, kl, qx_complex, random_distribution,
    PolyCochain, QxSource, Variable,
};
use catnet::rng::seeded;
use catnet::simplicial::{directed_flag_complex, FlagVariant};
use catnet_oracles::{conditional_entropy, face_closure};
use proptest::prelude::*;
use rand::Rng;

const ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

/// `S_α(X) + Σ_x p(x)^α S_α(Y | X = x)` from a table, and `S_α(X, Y)`.
fn chain_rule_sides(t: &[Vec<f64>], alpha: f64) -> (f64, f64) {
    let s = |v: &[f64]| entropy(v, alpha).unwrap();
    let px: Vec<f64> = t.iter().map(|r| r.iter().sum()).collect();
    let mut rhs = s(&px);
    for (r, &m) in t.iter().zip(&px) {
        if m > 0.0 {
            let cond: Vec<f64> = r.iter().map(|v| v / m).collect();
            rhs += m.powf(alpha) * s(&cond);
        }
    }
    let flat: Vec<f64> = t.iter().flatten().copied().collect();
    (s(&flat), rhs)
}

#[test]
fn entropy_is_a_cocycle() {
    let mut rng = seeded(1);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let (a, b) = (rng.gen_range(2..5), rng.gen_range(2..5));
        let p = random_distribution(&[a, b], &mut rng);
        let (x1, x2) = (p.axis_variable(&[0]), p.axis_variable(&[1]));
        let alpha = ALPHAS[i % 4];
        let f = entropy_cochain(alpha);
        worst = worst.max(coboundary1(&f, &x1, &x2, p.probs(), alpha).abs());
        worst = worst.max(coboundary1(&f, &x2, &x1, p.probs(), alpha).abs());
        let table: Vec<Vec<f64>> = p.probs().chunks(b).map(<[f64]>::to_vec).collect();
        let (joint, chained) = chain_rule_sides(&table, alpha);
        worst = worst.max((joint - chained).abs());
        if alpha == 1.0 {
            let sx = entropy(&x1.pushforward(p.probs()), 1.0).unwrap();
            worst = worst.max((joint - sx - conditional_entropy(&table)).abs());
        }
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn coboundary_squares_to_zero() {
    let mut rng = seeded(2);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let p = random_distribution(&[2, 3], &mut rng);
        let c = PolyCochain::random(6, &mut rng);
        let f = |q: &[f64]| c.eval(q);
        let alpha = ALPHAS[i % 4];
        let (x1, x2) = (p.axis_variable(&[0]), p.axis_variable(&[1]));
        worst = worst.max(coboundary_squared(&f, &x1, &x2, p.probs(), alpha).abs());
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn nerve_of_code_is_closure_of_supports() {
    for seed in 0..30 {
        let c = gen_bernoulli_code(5, 6, 0.4, seed).unwrap();
        let k = qx_complex(QxSource::Code(&c)).unwrap();
        let supports: Vec<Vec<u32>> = c
            .nonzero_words()
            .iter()
            .map(|w| (0..5u32).filter(|&i| w[i as usize] != 0).collect())
            .collect();
        assert_eq!(k.iter().cloned().collect::<std::collections::BTreeSet<_>>(), face_closure(&supports));
        let o = code_to_outcomes(&c);
        assert_eq!(o.outcomes, c.len());
        assert!(o.digits.iter().all(|d| d.is_coarser_than(&Variable::identity(c.len()))));
    }
}

#[test]
fn graph_source_reproduces_flag_complex() {
    for seed in 0..20 {
        let g = gen_erdos_renyi(6, 0.4, seed).unwrap();
        let k = qx_complex(QxSource::Graph(&g, 3)).unwrap();
        assert_eq!(k, directed_flag_complex(&g, 3, FlagVariant::EdgePair).unwrap());
    }
}

proptest! {
    #[test]
    fn kl_is_nonnegative(seed in any::<u64>(), alpha in 0.05f64..=1.0, ai in 0usize..4) {
        let mut rng = seeded(seed);
        let p = random_distribution(&[3, 2], &mut rng);
        let q = random_distribution(&[3, 2], &mut rng);
        prop_assert!(kl(p.probs(), q.probs(), alpha).unwrap() >= -1e-12);
        prop_assert!(kl(p.probs(), p.probs(), ALPHAS[ai]).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn join_refines_both(labels in prop::collection::vec((0u8..3, 0u8..3), 1..12)) {
        let a = Variable::from_labels(&labels.iter().map(|x| x.0).collect::<Vec<_>>());
        let b = Variable::from_labels(&labels.iter().map(|x| x.1).collect::<Vec<_>>());
        let j = a.join(&b);
        prop_assert!(a.is_coarser_than(&j) && b.is_coarser_than(&j));
        prop_assert!(Variable::trivial(labels.len()).is_coarser_than(&a));
    }
}
