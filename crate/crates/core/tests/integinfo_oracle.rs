use catnet::graph::{gen_mlp, DiGraph};
use catnet::information::{random_distribution, JointDistribution};
use catnet::integinfo::{
    feedforward_ii, ii, ii_lambda, project, pythagorean_check, PartitionMode, ProjectOptions, SystemPartition, UpdateRule,
};
use catnet::rng::seeded;
use catnet_oracles::grid_min_kl_two_unit;
use proptest::prelude::*;

fn battery() -> Vec<JointDistribution> {
    (0..20).map(|s| random_distribution(&[2, 2, 2, 2], &mut seeded(100 + s))).collect()
}

#[test]
fn projection_matches_grid_search() {
    let lam = SystemPartition::finest(2);
    for p in battery() {
        let r = project(&p, &lam, &ProjectOptions::default()).unwrap();
        let table: [f64; 16] = p.probs().try_into().unwrap();
        let grid = grid_min_kl_two_unit(&table, 17, 5);
        assert!((r.kl_value - grid).abs() <= 1e-3, "{} vs {grid}", r.kl_value);
        assert!(r.constraint_residual <= 1e-9 && r.kkt_residual <= 1e-6);
    }
}

#[test]
fn projection_is_the_minimiser() {
    let lam = SystemPartition::finest(2);
    for (i, p) in battery().iter().enumerate() {
        let rep = pythagorean_check(p, &lam, 100, i as u64).unwrap();
        assert!(rep.min_gap >= -1e-8);
        assert!(ii(p, PartitionMode::Auto).unwrap().value >= -1e-10);
    }
}

#[test]
fn product_joints_are_not_integrated() {
    let mut rng = seeded(9);
    for _ in 0..20 {
        let a = random_distribution(&[2, 2], &mut rng);
        let b = random_distribution(&[2, 2], &mut rng);
        // P(x1,x2,y1,y2) = A(x1,y1) B(x2,y2)
        let mut probs = vec![0.0; 16];
        for (c, v) in probs.iter_mut().enumerate() {
            let (x1, x2, y1, y2) = (c >> 3 & 1, c >> 2 & 1, c >> 1 & 1, c & 1);
            *v = a.probs()[x1 * 2 + y1] * b.probs()[x2 * 2 + y2];
        }
        let p = JointDistribution::from_sizes(&[2, 2, 2, 2], probs).unwrap();
        assert!(ii(&p, PartitionMode::Auto).unwrap().value <= 1e-8);
    }
}

#[test]
fn unit_relabelling_leaves_ii_unchanged() {
    for p in battery() {
        let mut swapped = vec![0.0; 16];
        for (c, v) in p.probs().iter().enumerate() {
            let (x1, x2, y1, y2) = (c >> 3 & 1, c >> 2 & 1, c >> 1 & 1, c & 1);
            swapped[x2 << 3 | x1 << 2 | y2 << 1 | y1] = *v;
        }
        let q = JointDistribution::from_sizes(&[2, 2, 2, 2], swapped).unwrap();
        let lam = SystemPartition::finest(2);
        assert!((ii_lambda(&p, &lam).unwrap() - ii_lambda(&q, &lam).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn feedforward_networks_have_no_integration() {
    for shape in [&[1, 1][..], &[2, 2], &[2, 3, 1], &[3, 3, 3]] {
        let g = gen_mlp(shape).unwrap();
        for eps in [0.01, 0.05, 0.1, 0.2] {
            let r = feedforward_ii(&g, UpdateRule::Threshold, eps).unwrap();
            assert!(r.value <= 1e-6, "{shape:?} {eps}: {}", r.value);
        }
    }
}

#[test]
fn recurrent_xor_is_integrated() {
    let g = DiGraph::from_pairs(3, &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]).unwrap();
    assert!(feedforward_ii(&g, UpdateRule::Xor, 0.05).unwrap().value > 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ii_is_nonnegative_and_bounded_by_any_lambda(seed in any::<u64>()) {
        let p = random_distribution(&[2, 2, 2, 2, 2, 2], &mut seeded(seed));
        let r = ii(&p, PartitionMode::All).unwrap();
        prop_assert!(r.value >= -1e-10);
        prop_assert!(r.value <= ii_lambda(&p, &SystemPartition::finest(3)).unwrap() + 1e-12);
    }
}
