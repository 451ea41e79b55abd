use std::path::PathBuf;

use catnet::graph::DiGraph;
use catnet_cli::commands::{self, ErOptions};
use catnet_cli::config::ExperimentConfig;
use catnet_cli::pipeline::{self, PipelineOptions};
use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn options(word_length: usize) -> PipelineOptions {
    serde_json::from_value(serde_json::json!({"word_length": word_length, "max_dim": 2})).unwrap()
}

#[test]
fn single_idle_vertex_pipeline() {
    let g: DiGraph = serde_json::from_str(r#"{"vertices":[0],"edges":[]}"#).unwrap();
    let mut o = options(3);
    o.parts.insert(0, "idle".into());
    let report: Value = serde_json::from_str(&pipeline::run("idle", 0, &g, &o).unwrap()).unwrap();
    assert_eq!(report["code"]["value"], "3 2\n000\n");
    assert_eq!(report["entropy"], 0.0);
    assert_eq!(report["code_nerve"]["value"]["counts"], serde_json::json!([]));
    assert!(report["hopfield_ii"].is_null());
}

#[test]
fn every_example_config_runs() {
    let dir = configs();
    let graph = ExperimentConfig::<PipelineOptions>::load(&dir.join("pipeline.json")).unwrap();
    let out: Value = serde_json::from_str(&pipeline::pipeline(&graph).unwrap()).unwrap();
    assert_eq!(out["seed"], 42);
    assert_eq!(out["hopfield_ii"]["value"].as_array().unwrap().len(), 6);

    let ii = ExperimentConfig::load(&dir.join("ii_compute.json")).unwrap();
    let out: Value = serde_json::from_str(&commands::ii_compute(&ii).unwrap()).unwrap();
    assert!((out["ii"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-8);

    let cs = ExperimentConfig::load(&dir.join("code_stats.json")).unwrap();
    let out: Value = serde_json::from_str(&commands::code_stats(&cs).unwrap()).unwrap();
    assert_eq!(out["words"], 4);

    let ch = ExperimentConfig::load(&dir.join("clique_homology.json")).unwrap();
    let out: Value = serde_json::from_str(&commands::clique_homology(&ch).unwrap()).unwrap();
    assert_eq!(out["betti"], serde_json::json!([1, 0]));
    assert_eq!(out["counts"], serde_json::json!([3, 2]));
}

#[test]
fn unknown_option_is_rejected() {
    let dir = std::env::temp_dir().join(format!("catnet-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"experiment":"x","seed":1,"options":{"n":4,"p":[0.5],"trials":1,"k":1,"max_dim":1,"bogus":3}}"#).unwrap();
    assert!(ExperimentConfig::<ErOptions>::load(&path).is_err());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn er_csv_has_one_row_per_trial() {
    let o: ErOptions = serde_json::from_str(r#"{"n":8,"p":[0.1,0.9],"trials":5,"k":1,"max_dim":2}"#).unwrap();
    let e = commands::er_ensemble(3, &o).unwrap();
    let csv = e.to_csv();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("seed,n,p,beta_0,beta_1,beta_2,proxy\n"));
    assert!(!csv.contains('\r'));
}
