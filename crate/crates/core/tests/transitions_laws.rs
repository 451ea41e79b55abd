use std::collections::{BTreeMap, BTreeSet};

use catnet::codes::Code;
use catnet::graph::DiGraph;
use catnet::rng::seeded;
use catnet::transitions::{
    coproduct, extract_code, integrate_and_fire, language_words, product, relay, single_transition, xi, Owner,
    TransitionSystem, TsWord, DEFAULT_PRODUCT_CAP, DEFAULT_STRONG_BUDGET,
};
use catnet_oracles::{runs, strong_graft_shape, RunStep};
use rand::Rng;

fn plain(t: &TransitionSystem) -> Vec<(usize, String, usize)> {
    t.named_transitions().into_iter().map(|(s, l, d)| (s, l.to_string(), d)).collect()
}

fn oracle_runs(t: &TransitionSystem, n: usize) -> BTreeSet<Vec<RunStep>> {
    runs(t.n_states(), t.initial(), &plain(t), n)
}

fn as_runs(t: &TransitionSystem, words: &[TsWord]) -> BTreeSet<Vec<RunStep>> {
    words
        .iter()
        .map(|w| w.iter().map(|s| (s.src, s.label.map(|l| t.labels()[l].name.clone()), s.dst)).collect())
        .collect()
}

/// Small systems with no transitions into the initial state.
fn battery() -> Vec<TransitionSystem> {
    let mut out = vec![TransitionSystem::zero(), relay(), single_transition("a"), single_transition("b")];
    let mut rng = seeded(3);
    for i in 0..12 {
        let n = 2 + i % 4;
        let mut tr = Vec::new();
        for _ in 0..rng.gen_range(1..6) {
            let s = rng.gen_range(0..n);
            let d = rng.gen_range(1..n);
            tr.push((s, ["a", "b", "c"][rng.gen_range(0..3)], d));
        }
        let fin = if i % 3 == 0 { None } else { Some(n - 1) };
        out.push(TransitionSystem::new(n, 0, fin, vec![], &tr).unwrap());
    }
    out
}

#[test]
fn language_enumeration_matches_oracle() {
    for t in battery().iter().chain([integrate_and_fire(2)].iter()) {
        for n in 0..=5 {
            assert_eq!(as_runs(t, &language_words(t, n, 1 << 20).unwrap()), oracle_runs(t, n));
        }
    }
}

#[test]
fn coproduct_language_is_disjoint_union() {
    let bat = battery();
    for t1 in &bat {
        for t2 in &bat {
            let c = coproduct(t1, t2).unwrap();
            let sys = &c.system;
            for n in 0..=5 {
                let got = as_runs(sys, &language_words(sys, n, 1 << 20).unwrap());
                let embed = |r: &Vec<RunStep>, m: &[usize]| -> Vec<RunStep> {
                    r.iter().map(|(s, l, d)| (m[*s], l.clone(), m[*d])).collect()
                };
                let mut want: BTreeSet<Vec<RunStep>> = oracle_runs(t1, n).iter().map(|r| embed(r, &c.left)).collect();
                let right: BTreeSet<Vec<RunStep>> = oracle_runs(t2, n).iter().map(|r| embed(r, &c.right)).collect();
                // only the all-idle run is shared
                assert!(want.intersection(&right).count() <= 1);
                want.extend(right);
                assert_eq!(got, want);
            }
        }
    }
}

#[test]
fn product_projects_onto_factors() {
    let bat = battery();
    for t1 in bat.iter().take(8) {
        for t2 in bat.iter().skip(4).take(8) {
            let p = product(t1, t2, DEFAULT_PRODUCT_CAP).unwrap();
            let sys = &p.system;
            for n in 0..=3 {
                let words = language_words(sys, n, 1 << 20).unwrap();
                let (r1, r2) = (oracle_runs(t1, n), oracle_runs(t2, n));
                assert_eq!(words.len(), r1.len() * r2.len());
                for w in &words {
                    let name = |t: &TransitionSystem, l: Option<usize>| l.map(|i| t.labels()[i].name.clone());
                    let proj1: Vec<RunStep> = w
                        .iter()
                        .map(|s| {
                            let l = s.label.and_then(|l| p.label_pairs[l].0);
                            (p.pairs[s.src].0, name(t1, l), p.pairs[s.dst].0)
                        })
                        .collect();
                    let proj2: Vec<RunStep> = w
                        .iter()
                        .map(|s| {
                            let l = s.label.and_then(|l| p.label_pairs[l].1);
                            (p.pairs[s.src].1, name(t2, l), p.pairs[s.dst].1)
                        })
                        .collect();
                    assert!(r1.contains(&proj1) && r2.contains(&proj2));
                }
            }
        }
    }
}

#[test]
fn xi_on_two_cycle_plus_sink() {
    let g = DiGraph::from_pairs(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
    let parts: BTreeMap<_, _> =
        [(0, single_transition("a")), (1, single_transition("b")), (2, single_transition("c"))].into();
    let arch = xi(&g, &parts, DEFAULT_STRONG_BUDGET).unwrap();
    let (ss, st) = strong_graft_shape(&[2, 2], &[1, 1], 2);
    assert_eq!(arch.system.n_states(), ss + 2);
    assert_eq!(arch.system.transitions().len(), st + 1 + 1);
    let mut per_label: BTreeMap<String, usize> = BTreeMap::new();
    for (_, l, _) in arch.system.named_transitions() {
        *per_label.entry(l.to_string()).or_default() += 1;
    }
    let want: BTreeMap<String, usize> =
        [("a", 4), ("b", 4), ("c", 1), ("edge:0", 4), ("edge:1", 4), ("edge:2", 1)].map(|(l, c)| (l.to_string(), c)).into();
    assert_eq!(per_label, want);
    let words = language_words(&arch.system, 5, 1 << 20).unwrap();
    let names: BTreeSet<Vec<String>> = words
        .iter()
        .map(|w| w.iter().map(|s| s.label.map_or("*".into(), |l| arch.system.labels()[l].name.clone())).collect())
        .collect();
    for w in [["a", "edge:0", "b", "edge:2", "c"], ["b", "edge:2", "c", "*", "*"], ["b", "edge:1", "a", "edge:0", "b"]] {
        assert!(names.contains(w.map(String::from).as_slice()), "{w:?}");
    }
    for (s, l, d) in arch.system.transitions() {
        if let Owner::Vertex(v) = arch.owner((*s, *l, *d)) {
            let name = &arch.system.labels()[*l].name;
            assert_eq!(name, ["a", "b", "c"][v as usize]);
        }
    }
}

#[test]
fn one_transition_code() {
    assert_eq!(extract_code(&single_transition("a"), 2).unwrap(), Code::from_strs(2, &["00", "01", "10"]).unwrap());
}
