//! The experiment commands. Each is a pure function from a loaded config to
//! output text; the binary only decides where the text goes.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use catnet::codes::{
    firing_probability_exact, probability_exact, ratio_f64, relative_distance_entropy, Code, WeightedCode,
};
use catnet::graph::{gen_erdos_renyi_undirected, DiGraph, VertexId};
use catnet::hopfield::{equalizer_instance, random_inhibitory, HopfieldSystem, Variant};
use catnet::information::{entropy, JointDistribution};
use catnet::integinfo::{enumerate_partitions, hopfield_ii_trace, ii, project, PartitionMode, ProjectOptions, UnitShape};
use catnet::io::{csv, fmt_f64, to_sorted_json_pretty};
use catnet::rng::split_seed;
use catnet::simplicial::{betti, code_nerve, connectivity_proxy, directed_flag_complex, Field, FlagVariant};
use catnet::transitions::{
    activity_code, extract_code, integrate_and_fire, relay, single_transition, xi, TransitionSystem,
    DEFAULT_STRONG_BUDGET,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantOpt {
    #[default]
    SelfTerm,
    Pure,
}

impl From<VariantOpt> for Variant {
    fn from(v: VariantOpt) -> Self {
        match v {
            VariantOpt::SelfTerm => Variant::SelfTerm,
            VariantOpt::Pure => Variant::Pure,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorOpt {
    /// Random linear-inhibitory couplings.
    #[default]
    Random,
    /// Cycle-class couplings satisfying conservation.
    Equalizer,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionOpt {
    #[default]
    Auto,
    All,
    Bipartitions,
}

impl From<PartitionOpt> for PartitionMode {
    fn from(p: PartitionOpt) -> Self {
        match p {
            PartitionOpt::Auto => PartitionMode::Auto,
            PartitionOpt::All => PartitionMode::All,
            PartitionOpt::Bipartitions => PartitionMode::Bipartitions,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagOpt {
    #[default]
    EdgePair,
    Path,
    Undirected,
}

impl From<FlagOpt> for FlagVariant {
    fn from(f: FlagOpt) -> Self {
        match f {
            FlagOpt::EdgePair => FlagVariant::EdgePair,
            FlagOpt::Path => FlagVariant::Path,
            FlagOpt::Undirected => FlagVariant::Undirected,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldOpt {
    #[default]
    Gf2,
    Rationals,
}

impl From<FieldOpt> for Field {
    fn from(f: FieldOpt) -> Self {
        match f {
            FieldOpt::Gf2 => Field::Gf2,
            FieldOpt::Rationals => Field::Rationals,
        }
    }
}

fn read_graph<T>(cfg: &ExperimentConfig<T>) -> Result<DiGraph> {
    serde_json::from_str(&cfg.read_input("graph")?).context("graph")
}

pub(crate) fn hopfield_system(g: &DiGraph, generator: GeneratorOpt, variant: VariantOpt, seed: u64) -> Result<(HopfieldSystem, Vec<WeightedCode>)> {
    match generator {
        GeneratorOpt::Random => random_inhibitory(g, variant.into(), seed),
        GeneratorOpt::Equalizer => equalizer_instance(g, variant.into(), seed),
    }
    .context("hopfield")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfieldRunOptions {
    pub steps: usize,
    #[serde(default)]
    pub variant: VariantOpt,
    #[serde(default)]
    pub generator: GeneratorOpt,
}

/// Categorical and classical total weights per step and edge, with gates.
pub fn hopfield_run(cfg: &ExperimentConfig<HopfieldRunOptions>) -> Result<String> {
    hopfield_run_on(&read_graph(cfg)?, cfg.seed, &cfg.options)
}

pub fn hopfield_run_on(g: &DiGraph, seed: u64, o: &HopfieldRunOptions) -> Result<String> {
    let (sys, init) = hopfield_system(g, o.generator, o.variant, seed)?;
    let traj = sys.run(&init, o.steps).context("hopfield")?;
    let alpha = traj.alpha();
    let mut rows = Vec::new();
    for (n, (cat, cls)) in alpha.iter().zip(&traj.classical).enumerate() {
        for (i, &e) in sys.edges().iter().enumerate() {
            let gate = traj.gates.get(n).map_or(String::new(), |gs| u8::from(gs[i]).to_string());
            rows.push(vec![n.to_string(), e.to_string(), fmt_f64(cat[i]), fmt_f64(cls[i]), gate]);
        }
    }
    Ok(csv(&["step", "edge", "alpha_categorical", "alpha_classical", "gate"], rows))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfieldIiOptions {
    pub steps: usize,
    pub theta_b: f64,
    pub eps: f64,
    #[serde(default)]
    pub variant: VariantOpt,
    #[serde(default)]
    pub generator: GeneratorOpt,
    #[serde(default)]
    pub partitions: PartitionOpt,
}

/// Integrated information of the binarised Hopfield dynamics along the
/// classical trajectory.
pub fn hopfield_ii(cfg: &ExperimentConfig<HopfieldIiOptions>) -> Result<String> {
    hopfield_ii_on(&read_graph(cfg)?, cfg.seed, &cfg.options)
}

pub fn hopfield_ii_on(g: &DiGraph, seed: u64, o: &HopfieldIiOptions) -> Result<String> {
    let (sys, init) = hopfield_system(g, o.generator, o.variant, seed)?;
    let alpha0: Vec<f64> = init.iter().map(catnet::codes::total_weight).collect();
    let trace = hopfield_ii_trace(&sys, &alpha0, o.steps, o.theta_b, o.eps, o.partitions.into()).context("integinfo")?;
    let rows = trace.iter().map(|s| vec![s.step.to_string(), fmt_f64(s.ii), s.partition.encode()]);
    Ok(csv(&["step", "ii", "partition"], rows))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IiComputeOptions {
    #[serde(default)]
    pub partitions: PartitionOpt,
}

#[derive(Serialize)]
struct LambdaRow {
    partition: String,
    kl: f64,
    constraint_residual: f64,
    kkt_residual: f64,
}

/// II of a joint read from the `joint` input, with every partition tried.
pub fn ii_compute(cfg: &ExperimentConfig<IiComputeOptions>) -> Result<String> {
    let p: JointDistribution = serde_json::from_str(&cfg.read_input("joint")?).context("joint")?;
    let mode: PartitionMode = cfg.options.partitions.into();
    let units = UnitShape::of(&p).context("integinfo")?.units();
    let mut lambdas = Vec::new();
    for lam in enumerate_partitions(units, mode).context("integinfo")? {
        let r = project(&p, &lam, &ProjectOptions::default()).context("integinfo")?;
        lambdas.push(LambdaRow {
            partition: lam.encode(),
            kl: r.kl_value,
            constraint_residual: r.constraint_residual,
            kkt_residual: r.kkt_residual,
        });
    }
    let best = ii(&p, mode).context("integinfo")?;
    Ok(to_sorted_json_pretty(&json!({
        "ii": best.value,
        "partition": best.partition.encode(),
        "units": units,
        "lambdas": lambdas,
    })))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErOptions {
    pub n: u32,
    pub p: Vec<f64>,
    pub trials: usize,
    /// Order of the connectivity proxy.
    pub k: usize,
    pub max_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErTrial {
    pub seed: u64,
    pub p: f64,
    pub betti: Vec<usize>,
    pub proxy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErSummary {
    pub p: f64,
    pub trials: usize,
    /// Fraction passing the connectivity proxy of order `k`.
    pub proxy_fraction: f64,
    /// Fraction with `β_k > 0` and `β_{k+1} = 0`.
    pub dominant_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErEnsemble {
    pub n: u32,
    pub trials: Vec<ErTrial>,
    pub summary: Vec<ErSummary>,
}

/// Clique complexes of undirected `G(n, p)` for each `p`, trials in
/// parallel, rows in (p index, trial) order.
pub fn er_ensemble(seed: u64, o: &ErOptions) -> Result<ErEnsemble> {
    if o.max_dim < o.k + 1 {
        bail!("max_dim must be at least k + 1");
    }
    let jobs: Vec<(usize, usize)> = (0..o.p.len()).flat_map(|i| (0..o.trials).map(move |t| (i, t))).collect();
    let trials = jobs
        .par_iter()
        .map(|&(i, t)| {
            let s = split_seed(seed, (i * o.trials + t) as u64);
            let g = gen_erdos_renyi_undirected(o.n, o.p[i], s)?;
            let k = directed_flag_complex(&g, o.max_dim, FlagVariant::Undirected)?;
            let mut b = betti(&k, Field::Gf2);
            b.resize(o.max_dim + 1, 0);
            Ok(ErTrial { seed: s, p: o.p[i], proxy: connectivity_proxy(&k, o.k), betti: b })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = o
        .p
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let rows = &trials[i * o.trials..(i + 1) * o.trials];
            let frac = |f: &dyn Fn(&ErTrial) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / o.trials.max(1) as f64;
            ErSummary {
                p,
                trials: o.trials,
                proxy_fraction: frac(&|r| r.proxy),
                dominant_fraction: frac(&|r| r.betti[o.k] > 0 && r.betti[o.k + 1] == 0),
            }
        })
        .collect();
    Ok(ErEnsemble { n: o.n, trials, summary })
}

impl ErEnsemble {
    pub fn to_csv(&self) -> String {
        let dims = self.trials.first().map_or(0, |t| t.betti.len());
        let names: Vec<String> = (0..dims).map(|d| format!("beta_{d}")).collect();
        let mut header = vec!["seed", "n", "p"];
        header.extend(names.iter().map(String::as_str));
        header.push("proxy");
        let rows = self.trials.iter().map(|t| {
            let mut r = vec![t.seed.to_string(), self.n.to_string(), fmt_f64(t.p)];
            r.extend(t.betti.iter().map(usize::to_string));
            r.push(u8::from(t.proxy).to_string());
            r
        });
        csv(&header, rows)
    }

    pub fn summary_json(&self) -> String {
        to_sorted_json_pretty(&self.summary)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliqueOptions {
    pub max_dim: usize,
    #[serde(default)]
    pub variant: FlagOpt,
    #[serde(default)]
    pub field: FieldOpt,
}

/// Simplex counts and Betti numbers of the flag complex of the `graph` input.
pub fn clique_homology(cfg: &ExperimentConfig<CliqueOptions>) -> Result<String> {
    let g = read_graph(cfg)?;
    let o = &cfg.options;
    let k = directed_flag_complex(&g, o.max_dim, o.variant.into()).context("simplicial")?;
    Ok(to_sorted_json_pretty(&json!({
        "counts": k.counts(),
        "betti": betti(&k, o.field.into()),
        "euler_characteristic": k.euler_characteristic(),
        "dim": k.dim(),
    })))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeStatsOptions {}

/// Probabilities, distances and nerve homology of the `code` input.
pub fn code_stats(cfg: &ExperimentConfig<CodeStatsOptions>) -> Result<String> {
    let c = Code::parse(&cfg.read_input("code")?).context("code")?;
    Ok(to_sorted_json_pretty(&code_report(&c)?))
}

fn code_report(c: &Code) -> Result<serde_json::Value> {
    let nerve = code_nerve(c).context("simplicial")?;
    let (prob, entropy_value) = match probability_exact(c) {
        Ok(p) => {
            let f: Vec<f64> = p.iter().map(ratio_f64).collect();
            let s = entropy(&f, 1.0).context("information")?;
            (json!(p.iter().map(ToString::to_string).collect::<Vec<_>>()), json!(s))
        }
        Err(e) => (json!(e.to_string()), serde_json::Value::Null),
    };
    Ok(json!({
        "n": c.n(),
        "q": c.q(),
        "words": c.len(),
        "min_distance": c.min_distance(),
        "probability": prob,
        "entropy": entropy_value,
        "firing_probability": firing_probability_exact(c).to_string(),
        "relative_distance_entropy": relative_distance_entropy(c),
        "nerve_counts": nerve.counts(),
        "nerve_betti": betti(&nerve, Field::Gf2),
    }))
}

/// A per-vertex part: `idle` (one state), `fire:<label>` (one transition)
/// or `iaf:<levels>` (integrate and fire).
pub fn parse_part(desc: &str) -> Result<TransitionSystem> {
    if desc == "idle" {
        return Ok(relay());
    }
    if let Some(l) = desc.strip_prefix("fire:") {
        return Ok(single_transition(l));
    }
    if let Some(k) = desc.strip_prefix("iaf:") {
        return Ok(integrate_and_fire(k.parse().with_context(|| format!("part '{desc}'"))?));
    }
    bail!("unknown part '{desc}'")
}

fn parts_for(g: &DiGraph, specs: &BTreeMap<VertexId, String>) -> Result<BTreeMap<VertexId, TransitionSystem>> {
    g.vertices()
        .iter()
        .map(|&v| {
            let t = match specs.get(&v) {
                Some(s) => parse_part(s)?,
                None => single_transition(&format!("v{v}")),
            };
            Ok((v, t))
        })
        .collect()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsOptions {
    pub word_length: usize,
    #[serde(default)]
    pub parts: BTreeMap<VertexId, String>,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_budget() -> usize {
    DEFAULT_STRONG_BUDGET
}

/// The architecture of the `graph` input with its codes.
pub fn transitions_build(cfg: &ExperimentConfig<TransitionsOptions>) -> Result<String> {
    let g = read_graph(cfg)?;
    let o = &cfg.options;
    let arch = xi(&g, &parts_for(&g, &o.parts)?, o.budget).context("transitions")?;
    let code = extract_code(&arch.system, o.word_length).context("transitions")?;
    let act = activity_code(&arch, g.vertices(), o.word_length).context("transitions")?;
    let system: serde_json::Value = serde_json::from_str(&arch.system.to_json())?;
    Ok(to_sorted_json_pretty(&json!({
        "system": system,
        "states": arch.system.n_states(),
        "transitions": arch.system.transitions().len(),
        "code": code.to_text(),
        "activity_code": act.to_text(),
    })))
}
