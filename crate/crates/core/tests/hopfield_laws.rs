mod common;

use std::time::Instant;

use catnet::codes::WeightedCode;
use catnet::graph::gen_erdos_renyi;
use catnet::hopfield::{equalizer_instance, random_inhibitory, HopfieldSystem, Variant};
use common::{build, digraphs};

/// Total-weight recurrence written out from the couplings alone.
fn classical_oracle(sys: &HopfieldSystem, init: &[WeightedCode], steps: usize) -> Vec<Vec<f64>> {
    let t = sys.coupling();
    let th = sys.theta_alpha();
    let mut a: Vec<f64> = init.iter().map(|c| c.weights().iter().sum()).collect();
    let mut out = vec![a.clone()];
    for _ in 0..steps {
        a = (0..a.len())
            .map(|i| {
                let mut y = th[i];
                for j in 0..a.len() {
                    y += t[i][j] * a[j];
                }
                let g = if y >= 0.0 { y } else { 0.0 };
                match sys.variant() {
                    Variant::SelfTerm => a[i] + g,
                    Variant::Pure => g,
                }
            })
            .collect();
        out.push(a.clone());
    }
    out
}

#[test]
fn categorical_weights_follow_classical_recurrence() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut systems = 0;
    let mut seed = 0u64;
    while systems < 20 {
        seed += 1;
        let g = gen_erdos_renyi(5, 0.35, seed).unwrap();
        if g.edge_count() == 0 || g.edge_count() > 12 {
            continue;
        }
        let variant = if systems % 2 == 0 { Variant::SelfTerm } else { Variant::Pure };
        let (sys, init) = random_inhibitory(&g, variant, seed).unwrap();
        let traj = sys.run(&init, 50).unwrap();
        let oracle = classical_oracle(&sys, &init, 50);
        for (row, want) in traj.alpha().iter().zip(&oracle) {
            for (x, y) in row.iter().zip(want) {
                worst = worst.max((x - y).abs());
            }
        }
        let rep = sys.verify_reduction(&init, 8, 20_000).unwrap();
        assert!(rep.word_checked > 0);
        worst = worst.max(rep.max_deviation());
        systems += 1;
    }
    assert!(worst <= 1e-9, "{worst}");
    assert!(start.elapsed().as_secs_f64() <= 5.0);
}

#[test]
fn equalizer_states_on_all_small_digraphs() {
    let mut violations = 0;
    let mut graphs = 0;
    for n in 1..=4 {
        for (i, pairs) in digraphs(n).into_iter().enumerate() {
            if pairs.is_empty() {
                continue;
            }
            let g = build(n, &pairs);
            let variant = if i % 2 == 0 { Variant::SelfTerm } else { Variant::Pure };
            let (sys, init) = equalizer_instance(&g, variant, i as u64).unwrap();
            assert!(sys.is_vertex_balanced(1e-12));
            let mut traj = sys.run(&init, 20).unwrap();
            for s in traj.states.clone() {
                if !sys.state_in_equalizer(&mut traj.arena, &s, 1e-9, 1 << 16).unwrap() {
                    violations += 1;
                }
            }
            graphs += 1;
        }
    }
    assert_eq!(graphs, 3 + 63 + 4095);
    assert_eq!(violations, 0);
}
