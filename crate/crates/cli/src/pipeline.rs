//! The end-to-end run: graph to architecture to code to entropy, graph to
//! flag complex to homology, and Hopfield dynamics to integrated
//! information, with a content hash for every intermediate artifact.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use catnet::codes::{probability, total_weight};
use catnet::graph::{DiGraph, VertexId};
use catnet::information::entropy;
use catnet::integinfo::hopfield_ii_trace;
use catnet::io::{to_sorted_json, to_sorted_json_pretty};
use catnet::simplicial::{betti, code_nerve, directed_flag_complex, Field, FlagVariant};
use catnet::transitions::{extract_code, language_words, xi, DEFAULT_WORD_BUDGET};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::commands::{hopfield_system, parse_part, GeneratorOpt, PartitionOpt, VariantOpt};
use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineHopfield {
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

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineOptions {
    pub word_length: usize,
    pub max_dim: usize,
    #[serde(default)]
    pub parts: BTreeMap<VertexId, String>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub hopfield: Option<PipelineHopfield>,
}

fn default_budget() -> usize {
    catnet::transitions::DEFAULT_STRONG_BUDGET
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn hashed(v: Value) -> Value {
    let h = sha256_hex(to_sorted_json(&v).as_bytes());
    json!({ "value": v, "sha256": h })
}

/// Runs every stage on an in-memory graph.
pub fn run(experiment: &str, seed: u64, g: &DiGraph, o: &PipelineOptions) -> Result<String> {
    let mut parts = BTreeMap::new();
    for &v in g.vertices() {
        let desc = o.parts.get(&v).cloned().unwrap_or_else(|| format!("fire:v{v}"));
        parts.insert(v, parse_part(&desc).context("transitions")?);
    }
    let arch = xi(g, &parts, o.budget).context("transitions")?;
    let words = language_words(&arch.system, o.word_length, DEFAULT_WORD_BUDGET).context("transitions")?;
    let code = extract_code(&arch.system, o.word_length).context("transitions")?;
    let p = probability(&code).context("codes")?;
    let s = entropy(&p, 1.0).context("information")?;
    let nerve = code_nerve(&code).context("simplicial")?;
    let flag = directed_flag_complex(g, o.max_dim, FlagVariant::EdgePair).context("simplicial")?;
    let hop = match &o.hopfield {
        Some(h) if g.edge_count() > 0 => {
            let (sys, init) = hopfield_system(g, h.generator, h.variant, seed)?;
            let alpha0: Vec<f64> = init.iter().map(total_weight).collect();
            let trace = hopfield_ii_trace(&sys, &alpha0, h.steps, h.theta_b, h.eps, h.partitions.into())
                .context("integinfo")?;
            let rows: Vec<Value> = trace
                .iter()
                .map(|t| json!({ "step": t.step, "ii": t.ii, "partition": t.partition.encode() }))
                .collect();
            hashed(json!(rows))
        }
        _ => Value::Null,
    };
    let word_strings: Vec<String> = words
        .iter()
        .map(|w| {
            w.iter()
                .map(|st| st.label.map_or("*".to_string(), |l| arch.system.labels()[l].name.clone()))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let report = json!({
        "experiment": experiment,
        "seed": seed,
        "graph": hashed(serde_json::to_value(g)?),
        "architecture": hashed(serde_json::from_str::<Value>(&arch.system.to_json())?),
        "language": hashed(json!({ "length": o.word_length, "count": words.len(), "words": word_strings })),
        "code": hashed(json!(code.to_text())),
        "probability": hashed(json!(p)),
        "entropy": s,
        "code_nerve": hashed(json!({ "counts": nerve.counts(), "betti": betti(&nerve, Field::Gf2) })),
        "flag_complex": hashed(json!({ "counts": flag.counts(), "betti": betti(&flag, Field::Gf2) })),
        "hopfield_ii": hop,
    });
    Ok(to_sorted_json_pretty(&report))
}

pub fn pipeline(cfg: &ExperimentConfig<PipelineOptions>) -> Result<String> {
    let g: DiGraph = serde_json::from_str(&cfg.read_input("graph")?).context("graph")?;
    run(&cfg.experiment, cfg.seed, &g, &cfg.options)
}
