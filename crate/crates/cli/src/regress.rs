//! The acceptance criteria as executable checks. Each check measures a
//! quantity, compares it with a pinned tolerance and reports both.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use anyhow::Result;
use catnet::codes::{
    concat_sum, firing_probability_exact, gen_bernoulli_code, mix_law_check, ones_fraction, probability,
    probability_exact, wedge_mixing_coefficients, wedge_sum, Code, Rational,
};
use catnet::graph::{gen_erdos_renyi, gen_erdos_renyi_undirected, gen_mlp, DiGraph};
use catnet::hopfield::{equalizer_instance, random_inhibitory, Variant};
use catnet::information::{
    coboundary1, coboundary_squared, entropy_cochain, random_distribution, JointDistribution, PolyCochain,
};
use catnet::integinfo::{feedforward_ii, ii, project, pythagorean_check, PartitionMode, ProjectOptions, SystemPartition, UpdateRule};
use catnet::resources::{conversion_rate, Identity, IntVectors, Integers, LinearMeasuring, Measuring};
use catnet::rng::seeded;
use catnet::simplicial::{betti, directed_flag_complex, persistence, Field, Filtration, FlagVariant, SimplicialComplex};
use catnet::transitions::{
    coproduct, extract_code, language_words, product, relay, single_transition, xi, TransitionSystem, TsWord,
    DEFAULT_PRODUCT_CAP, DEFAULT_STRONG_BUDGET,
};
use catnet_oracles::{betti_dense, grid_min_kl_two_unit, runs, strong_graft_shape, Coefficients, RunStep};
use rand::Rng;
use rayon::prelude::*;

use crate::commands::{hopfield_ii_on, hopfield_run_on, er_ensemble, ErOptions, HopfieldIiOptions, HopfieldRunOptions};
use crate::pipeline::{self, PipelineHopfield, PipelineOptions};

/// Every threshold the suite compares against.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub hopfield_alpha: f64,
    pub hopfield_seconds: f64,
    pub cocycle: f64,
    pub code_prob: f64,
    pub firing_dev: f64,
    pub firing_min_hits: usize,
    pub mlp_ii: f64,
    pub xor_ii_min: f64,
    pub grid_gap: f64,
    pub ii_floor: f64,
    pub product_ii: f64,
    pub minimiser_slack: f64,
    pub er_proxy_fraction: f64,
    pub er_dominant_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hopfield_alpha: 1e-9,
            hopfield_seconds: 5.0,
            cocycle: 1e-10,
            code_prob: 1e-12,
            firing_dev: 0.02,
            firing_min_hits: 99,
            mlp_ii: 1e-6,
            xor_ii_min: 0.01,
            grid_gap: 1e-3,
            ii_floor: 1e-10,
            product_ii: 1e-8,
            minimiser_slack: 1e-8,
            er_proxy_fraction: 0.9,
            er_dominant_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} [{:>2}] {}: {}", self.id, self.name, self.measured)
    }
}

pub const NAMES: [&str; 12] = [
    "hopfield reduction",
    "equalizer invariance",
    "entropy cocycle",
    "code probability laws",
    "firing-rate model",
    "homology oracle",
    "feedforward triviality",
    "II projection oracle",
    "ER regimes",
    "transition-system laws",
    "conversion-rate bound",
    "determinism",
];

type Check = fn(&Tolerances) -> Result<(bool, String)>;

const CHECKS: [Check; 12] = [
    hopfield_reduction,
    equalizer_invariance,
    entropy_cocycle,
    code_laws,
    firing_rate,
    homology_oracle,
    feedforward_triviality,
    ii_projection,
    er_regimes,
    transition_laws,
    conversion_bound,
    determinism,
];

/// Runs criterion `id` (1-based). Errors count as failures.
pub fn run_one(id: usize, tol: &Tolerances) -> Outcome {
    let (passed, measured) = match CHECKS[id - 1](tol) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e:#}")),
    };
    Outcome { id, name: NAMES[id - 1], passed, measured }
}

pub fn run_all(tol: &Tolerances) -> Vec<Outcome> {
    (1..=CHECKS.len()).map(|i| run_one(i, tol)).collect()
}

pub fn table(outcomes: &[Outcome]) -> String {
    let mut s: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    s.push_str(&format!("{} passed, {failed} failed\n", outcomes.len() - failed));
    s
}

fn hopfield_reduction(tol: &Tolerances) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut words_checked = 0;
    let (mut systems, mut seed) = (0, 0u64);
    while systems < 20 {
        seed += 1;
        let g = gen_erdos_renyi(5, 0.35, seed)?;
        if g.edge_count() == 0 || g.edge_count() > 12 {
            continue;
        }
        let variant = if systems % 2 == 0 { Variant::SelfTerm } else { Variant::Pure };
        let (sys, init) = random_inhibitory(&g, variant, seed)?;
        let rep = sys.verify_reduction(&init, 50, 20_000)?;
        worst = worst.max(rep.max_deviation());
        words_checked += rep.word_checked;
        systems += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst <= tol.hopfield_alpha && secs <= tol.hopfield_seconds && words_checked > 0;
    Ok((ok, format!("max dev {worst:.3e} (tol {:.0e}), {words_checked} cells word-summed, {secs:.2}s", tol.hopfield_alpha)))
}

fn digraphs(n: u32) -> Vec<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
        .collect()
}

fn equalizer_invariance(_: &Tolerances) -> Result<(bool, String)> {
    let mut graphs = Vec::new();
    for n in 1..=4 {
        graphs.extend(digraphs(n).into_iter().filter(|p| !p.is_empty()).map(|p| (n, p)));
    }
    let results: Vec<Result<(usize, bool)>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, (n, pairs))| {
            let g = DiGraph::from_pairs(*n, pairs)?;
            let variant = if i % 2 == 0 { Variant::SelfTerm } else { Variant::Pure };
            let (sys, init) = equalizer_instance(&g, variant, i as u64)?;
            let mut traj = sys.run(&init, 20)?;
            let mut bad = 0;
            for s in traj.states.clone() {
                if !sys.state_in_equalizer(&mut traj.arena, &s, 1e-9, 1 << 16)? {
                    bad += 1;
                }
            }
            Ok((bad, sys.is_vertex_balanced(1e-12)))
        })
        .collect();
    let mut violations = 0;
    let mut unbalanced = 0;
    for r in results {
        let (bad, balanced) = r?;
        violations += bad;
        unbalanced += usize::from(!balanced);
    }
    Ok((
        violations == 0 && unbalanced == 0,
        format!("{} graphs x 21 states, {violations} violations, {unbalanced} unbalanced couplings", graphs.len()),
    ))
}

fn entropy_cocycle(tol: &Tolerances) -> Result<(bool, String)> {
    let alphas = [0.5, 1.0, 2.0, 3.0];
    let mut rng = seeded(1);
    let mut d1: f64 = 0.0;
    for i in 0..500 {
        let (a, b) = (rng.gen_range(2..5), rng.gen_range(2..5));
        let p = random_distribution(&[a, b], &mut rng);
        let alpha = alphas[i % 4];
        let f = entropy_cochain(alpha);
        let (x1, x2) = (p.axis_variable(&[0]), p.axis_variable(&[1]));
        d1 = d1.max(coboundary1(&f, &x1, &x2, p.probs(), alpha).abs());
    }
    let mut d2: f64 = 0.0;
    for i in 0..100 {
        let p = random_distribution(&[2, 3], &mut rng);
        let c = PolyCochain::random(6, &mut rng);
        let f = |q: &[f64]| c.eval(q);
        let (x1, x2) = (p.axis_variable(&[0]), p.axis_variable(&[1]));
        d2 = d2.max(coboundary_squared(&f, &x1, &x2, p.probs(), alphas[i % 4]).abs());
    }
    Ok((
        d1 <= tol.cocycle && d2 <= tol.cocycle,
        format!("max |dS| {d1:.3e}, max |ddf| {d2:.3e} (tol {:.0e})", tol.cocycle),
    ))
}

fn code_laws(tol: &Tolerances) -> Result<(bool, String)> {
    let mut norm: f64 = 0.0;
    let mut exact_ok = true;
    let mut generated = 0;
    for seed in 0..200u64 {
        let c = gen_bernoulli_code(3 + (seed % 6) as usize, 1 + (seed % 9) as usize, 0.3, seed)?;
        if let Ok(p) = probability_exact(&c) {
            exact_ok &= p.iter().sum::<Rational>() == Rational::from_integer(1);
            norm = norm.max((probability(&c)?.iter().sum::<f64>() - 1.0).abs());
            generated += 1;
        }
    }
    let mut mix: f64 = 0.0;
    let mut wedge_ok = true;
    for seed in 0..100u64 {
        let (n1, n2) = (2 + (seed % 5) as usize, 1 + (seed % 7) as usize);
        let (a, b) = (gen_bernoulli_code(n1, 3, 0.3, seed)?, gen_bernoulli_code(n2, 2, 0.3, seed + 7)?);
        mix = mix.max(mix_law_check(&a, &b)?.1);
        let l = Rational::new(n1 as i64, (n1 + n2) as i64);
        let lhs = firing_probability_exact(&concat_sum(&a, &b)?);
        exact_ok &= lhs == l * firing_probability_exact(&a) + (Rational::from_integer(1) - l) * firing_probability_exact(&b);
        let (c1, c2) = (gen_bernoulli_code(5, 4, 0.3, seed)?, gen_bernoulli_code(5, 3, 0.3, seed + 1000)?);
        let w = wedge_sum(&c1, &c2)?;
        if let Ok(pw) = probability_exact(&w) {
            let (na, nb) = ((c1.len() - 1) as i64, (c2.len() - 1) as i64);
            let (la, lb) = wedge_mixing_coefficients(&c1, &c2);
            wedge_ok &= (la, lb) == (Rational::new(na, na + nb), Rational::new(nb, na + nb));
            let ones = |w: &[u8]| w.iter().filter(|&&d| d != 0).count() as i64;
            for (i, word) in c1.nonzero_words().iter().enumerate() {
                wedge_ok &= pw[1 + i] == la * Rational::new(ones(word), 5 * na);
            }
            for (i, word) in c2.nonzero_words().iter().enumerate() {
                wedge_ok &= pw[1 + c1.nonzero_words().len() + i] == lb * Rational::new(ones(word), 5 * nb);
            }
        }
    }
    let ok = norm <= tol.code_prob && mix <= tol.code_prob && exact_ok && wedge_ok;
    Ok((
        ok,
        format!(
            "normalisation {norm:.3e} over {generated} codes, mixing {mix:.3e} (tol {:.0e}), exact sums {exact_ok}, wedge coefficients {wedge_ok}",
            tol.code_prob
        ),
    ))
}

fn firing_rate(tol: &Tolerances) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for &p in &[0.1, 0.3, 0.5] {
        let hits: usize = (0..100u64)
            .into_par_iter()
            .map(|s| Ok(usize::from((ones_fraction(&gen_bernoulli_code(10_000, 1, p, s)?) - p).abs() < tol.firing_dev)))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .sum();
        ok &= hits >= tol.firing_min_hits;
        parts.push(format!("p={p}: {hits}/100"));
    }
    Ok((ok, format!("{} within {} (need {})", parts.join(", "), tol.firing_dev, tol.firing_min_hits)))
}

fn trimmed(mut b: Vec<usize>) -> Vec<usize> {
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn homology_oracle(_: &Tolerances) -> Result<(bool, String)> {
    let mut complexes: Vec<SimplicialComplex> = Vec::new();
    for n in 1..=4 {
        for pairs in digraphs(n) {
            let g = DiGraph::from_pairs(n, &pairs)?;
            complexes.push(directed_flag_complex(&g, 3, FlagVariant::EdgePair)?);
            complexes.push(directed_flag_complex(&g, 3, FlagVariant::Undirected)?);
        }
    }
    for seed in 0..60u64 {
        let n = 5 + (seed % 3) as u32;
        complexes.push(directed_flag_complex(&gen_erdos_renyi(n, 0.45, seed)?, 6, FlagVariant::EdgePair)?);
        complexes.push(directed_flag_complex(&gen_erdos_renyi_undirected(n, 0.6, seed)?, 6, FlagVariant::Undirected)?);
    }
    let named: [(u32, &[(u32, u32)], usize, Vec<usize>); 3] = [
        (3, &[(0, 1), (1, 2), (2, 0)], 3, vec![1, 1]),
        (3, &[(0, 1), (1, 2), (0, 2)], 3, vec![1, 0, 0]),
        (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 2, vec![1, 0, 1]),
    ];
    let mut named_ok = true;
    for (n, pairs, max_dim, want) in &named {
        let k = directed_flag_complex(&DiGraph::from_pairs(*n, pairs)?, *max_dim, FlagVariant::EdgePair)?;
        named_ok &= trimmed(betti(&k, Field::Gf2)) == trimmed(want.clone());
        complexes.push(k);
    }
    let mismatches = complexes
        .par_iter()
        .filter(|k| {
            let raw: Vec<Vec<u32>> = k.iter().cloned().collect();
            trimmed(betti(k, Field::Gf2)) != trimmed(betti_dense(&raw, Coefficients::Gf2))
        })
        .count();
    let mut bar_mismatch = 0;
    for seed in 0..50u64 {
        let mut rng = seeded(seed);
        let n = 4 + (seed % 4) as u32;
        let k = directed_flag_complex(&gen_erdos_renyi_undirected(n, 0.5, seed)?, 3, FlagVariant::Undirected)?;
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let f = Filtration::from_fn(k.clone(), |s| s.iter().map(|&v| vals[v as usize]).fold(0.0, f64::max))?;
        let bars = persistence(&f);
        for (d, &bd) in betti(&k, Field::Gf2).iter().enumerate() {
            if bars.iter().filter(|b| b.dim == d && b.death.is_infinite()).count() != bd {
                bar_mismatch += 1;
            }
        }
    }
    Ok((
        mismatches == 0 && bar_mismatch == 0 && named_ok,
        format!(
            "{} complexes, {mismatches} Betti mismatches, named cases {named_ok}, 50 filtrations with {bar_mismatch} infinite-bar mismatches",
            complexes.len()
        ),
    ))
}

const MLP_SHAPES: [&[u32]; 4] = [&[1, 1], &[2, 2], &[2, 3, 1], &[3, 3, 3]];

fn feedforward_triviality(tol: &Tolerances) -> Result<(bool, String)> {
    let mut high_simplices = 0;
    let mut worst: f64 = 0.0;
    for shape in MLP_SHAPES {
        let g = gen_mlp(shape)?;
        let k = directed_flag_complex(&g, 4, FlagVariant::EdgePair)?;
        high_simplices += (2..k.counts().len()).map(|d| k.count(d)).sum::<usize>();
        for eps in [0.01, 0.05, 0.1, 0.2] {
            worst = worst.max(feedforward_ii(&g, UpdateRule::Threshold, eps)?.value);
        }
    }
    let ring = DiGraph::from_pairs(3, &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)])?;
    let xor = feedforward_ii(&ring, UpdateRule::Xor, 0.05)?.value;
    Ok((
        high_simplices == 0 && worst <= tol.mlp_ii && xor > tol.xor_ii_min,
        format!(
            "{high_simplices} simplices of dim >= 2, max feedforward II {worst:.3e} (tol {:.0e}), recurrent XOR II {xor:.4} (need > {})",
            tol.mlp_ii, tol.xor_ii_min
        ),
    ))
}

fn ii_battery() -> Vec<JointDistribution> {
    (0..20).map(|s| random_distribution(&[2, 2, 2, 2], &mut seeded(100 + s))).collect()
}

fn ii_projection(tol: &Tolerances) -> Result<(bool, String)> {
    let lam = SystemPartition::finest(2);
    let battery = ii_battery();
    let rows: Vec<Result<(f64, f64, f64)>> = battery
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let r = project(p, &lam, &ProjectOptions::default())?;
            let table: [f64; 16] = p.probs().try_into()?;
            let gap = (r.kl_value - grid_min_kl_two_unit(&table, 17, 5)).abs();
            let value = ii(p, PartitionMode::Auto)?.value;
            let min_gap = pythagorean_check(p, &lam, 100, i as u64)?.min_gap;
            Ok((gap, value, min_gap))
        })
        .collect();
    let (mut gap, mut floor, mut slack) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for r in rows {
        let (g, v, m) = r?;
        gap = gap.max(g);
        floor = floor.min(v);
        slack = slack.min(m);
    }
    let mut rng = seeded(9);
    let mut product_ii: f64 = 0.0;
    for _ in 0..20 {
        let a = random_distribution(&[2, 2], &mut rng);
        let b = random_distribution(&[2, 2], &mut rng);
        let probs = (0..16usize)
            .map(|c| a.probs()[(c >> 3 & 1) * 2 + (c >> 1 & 1)] * b.probs()[(c >> 2 & 1) * 2 + (c & 1)])
            .collect();
        product_ii = product_ii.max(ii(&JointDistribution::from_sizes(&[2, 2, 2, 2], probs)?, PartitionMode::Auto)?.value);
    }
    let ok = gap <= tol.grid_gap && floor >= -tol.ii_floor && product_ii <= tol.product_ii && slack >= -tol.minimiser_slack;
    Ok((
        ok,
        format!(
            "grid gap {gap:.3e} (tol {:.0e}), min II {floor:.3e}, product II {product_ii:.3e}, min KL(P||R)-KL(P||Q*) {slack:.3e}",
            tol.grid_gap
        ),
    ))
}

pub const ER_N: u32 = 40;
pub const ER_TRIALS: usize = 200;

pub fn er_window_p(n: u32) -> f64 {
    let n = f64::from(n);
    ((3.0 * n.ln() + 5.0) / n).powf(1.0 / 3.0)
}

fn er_regimes(tol: &Tolerances) -> Result<(bool, String)> {
    let dense = er_ensemble(
        0x5eed_0001,
        &ErOptions { n: ER_N, p: vec![er_window_p(ER_N)], trials: ER_TRIALS, k: 1, max_dim: 2 },
    )?;
    let sparse = er_ensemble(
        0x5eed_0002,
        &ErOptions { n: ER_N, p: vec![f64::from(ER_N).powf(-2.0 / 3.0)], trials: ER_TRIALS, k: 1, max_dim: 3 },
    )?;
    let (a, b) = (&dense.summary[0], &sparse.summary[0]);
    Ok((
        a.proxy_fraction >= tol.er_proxy_fraction && b.dominant_fraction >= tol.er_dominant_fraction,
        format!(
            "p={:.4}: proxy fraction {:.3} (need {}); p={:.4}: beta_1>0,beta_2=0 fraction {:.3} (need {})",
            a.p, a.proxy_fraction, tol.er_proxy_fraction, b.p, b.dominant_fraction, tol.er_dominant_fraction
        ),
    ))
}

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

/// Systems of at most five states with nothing entering the initial state.
fn ts_battery() -> Result<Vec<TransitionSystem>> {
    let mut out = vec![TransitionSystem::zero(), relay(), single_transition("a"), single_transition("b")];
    let mut rng = seeded(3);
    for i in 0..12 {
        let n = 2 + i % 4;
        let tr: Vec<(usize, &str, usize)> = (0..rng.gen_range(1..6))
            .map(|_| (rng.gen_range(0..n), ["a", "b", "c"][rng.gen_range(0..3)], rng.gen_range(1..n)))
            .collect();
        out.push(TransitionSystem::new(n, 0, if i % 3 == 0 { None } else { Some(n - 1) }, vec![], &tr)?);
    }
    Ok(out)
}

fn transition_laws(_: &Tolerances) -> Result<(bool, String)> {
    let bat = ts_battery()?;
    let mut coproduct_bad = 0;
    let mut coproduct_checked = 0;
    for t1 in &bat {
        for t2 in &bat {
            let c = coproduct(t1, t2)?;
            for n in 0..=5 {
                let got = as_runs(&c.system, &language_words(&c.system, n, 1 << 20)?);
                let embed = |r: &Vec<RunStep>, m: &[usize]| -> Vec<RunStep> {
                    r.iter().map(|(s, l, d)| (m[*s], l.clone(), m[*d])).collect()
                };
                let mut want: BTreeSet<Vec<RunStep>> = oracle_runs(t1, n).iter().map(|r| embed(r, &c.left)).collect();
                want.extend(oracle_runs(t2, n).iter().map(|r| embed(r, &c.right)));
                coproduct_checked += 1;
                coproduct_bad += usize::from(got != want);
            }
        }
    }
    let mut product_bad = 0;
    for t1 in bat.iter().take(8) {
        for t2 in bat.iter().skip(4).take(8) {
            let p = product(t1, t2, DEFAULT_PRODUCT_CAP)?;
            for n in 0..=3 {
                let words = language_words(&p.system, n, 1 << 20)?;
                let (r1, r2) = (oracle_runs(t1, n), oracle_runs(t2, n));
                let name = |t: &TransitionSystem, l: Option<usize>| l.map(|i| t.labels()[i].name.clone());
                let projected_ok = words.iter().all(|w| {
                    let a: Vec<RunStep> = w
                        .iter()
                        .map(|s| (p.pairs[s.src].0, name(t1, s.label.and_then(|l| p.label_pairs[l].0)), p.pairs[s.dst].0))
                        .collect();
                    let b: Vec<RunStep> = w
                        .iter()
                        .map(|s| (p.pairs[s.src].1, name(t2, s.label.and_then(|l| p.label_pairs[l].1)), p.pairs[s.dst].1))
                        .collect();
                    r1.contains(&a) && r2.contains(&b)
                });
                product_bad += usize::from(!projected_ok || words.len() != r1.len() * r2.len());
            }
        }
    }
    let g = DiGraph::from_pairs(3, &[(0, 1), (1, 0), (1, 2)])?;
    let parts: BTreeMap<_, _> =
        [(0, single_transition("a")), (1, single_transition("b")), (2, single_transition("c"))].into();
    let arch = xi(&g, &parts, DEFAULT_STRONG_BUDGET)?;
    let (ss, st) = strong_graft_shape(&[2, 2], &[1, 1], 2);
    let xi_ok = arch.system.n_states() == ss + 2 && arch.system.transitions().len() == st + 2;
    let code = extract_code(&single_transition("a"), 2)?;
    let code_ok = code == Code::from_strs(2, &["00", "01", "10"])?;
    Ok((
        coproduct_bad == 0 && product_bad == 0 && xi_ok && code_ok,
        format!(
            "coproduct {coproduct_bad}/{coproduct_checked} mismatches, product {product_bad} mismatches, Xi shape {} states/{} transitions (oracle {}/{}), one-transition code {}",
            arch.system.n_states(),
            arch.system.transitions().len(),
            ss + 2,
            st + 2,
            code.words().iter().map(|w| w.iter().map(u8::to_string).collect::<String>()).collect::<Vec<_>>().join(",")
        ),
    ))
}

fn conversion_bound(_: &Tolerances) -> Result<(bool, String)> {
    let mut rng = seeded(11);
    let mut violations = 0;
    for _ in 0..100 {
        let dim = rng.gen_range(1..4);
        let a: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..10)).collect();
        let b: Vec<i64> = (0..dim).map(|_| rng.gen_range(1..10)).collect();
        let meas = LinearMeasuring { weights: (0..dim).map(|_| rng.gen_range(0.1..2.0)).collect() };
        let r = conversion_rate(&IntVectors { dim }, &meas, &a, &b, 12)?;
        if *r.numer() as f64 / *r.denom() as f64 * meas.measure(&b) > meas.measure(&a) + 1e-12 {
            violations += 1;
        }
    }
    let r32 = conversion_rate(&Integers, &Identity, &3, &2, 16)?;
    Ok((
        violations == 0 && r32 == Rational::new(3, 2),
        format!("{violations} violations in 100 vector resources, rate(3,2) = {r32}"),
    ))
}

fn determinism(_: &Tolerances) -> Result<(bool, String)> {
    let g = DiGraph::from_pairs(3, &[(0, 1), (1, 0), (1, 2)])?;
    let popt = PipelineOptions {
        word_length: 4,
        max_dim: 2,
        parts: BTreeMap::new(),
        budget: DEFAULT_STRONG_BUDGET,
        hopfield: Some(PipelineHopfield {
            steps: 5,
            theta_b: 1.0,
            eps: 0.1,
            variant: Default::default(),
            generator: Default::default(),
            partitions: Default::default(),
        }),
    };
    let er = ErOptions { n: 12, p: vec![0.3, 0.6], trials: 16, k: 1, max_dim: 3 };
    let hr = HopfieldRunOptions { steps: 10, variant: Default::default(), generator: Default::default() };
    let hi = HopfieldIiOptions {
        steps: 4,
        theta_b: 1.0,
        eps: 0.1,
        variant: Default::default(),
        generator: Default::default(),
        partitions: Default::default(),
    };
    let outputs = |seed: u64| -> Result<Vec<String>> {
        let e = er_ensemble(seed, &er)?;
        Ok(vec![
            pipeline::run("determinism", seed, &g, &popt)?,
            e.to_csv(),
            e.summary_json(),
            hopfield_run_on(&g, seed, &hr)?,
            hopfield_ii_on(&g, seed, &hi)?,
        ])
    };
    let (a, b) = (outputs(42)?, outputs(42)?);
    let differ = outputs(43)? != a;
    let same = a == b;
    let bytes: usize = a.iter().map(String::len).sum();
    Ok((same && differ, format!("5 outputs, {bytes} bytes, identical across runs {same}, seed-sensitive {differ}")))
}
