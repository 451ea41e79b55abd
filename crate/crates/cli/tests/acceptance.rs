//! Acceptance suite: one PASS/FAIL line per criterion with the measured
//! values. Row 12 also runs the compiled binary twice on config files and
//! compares the bytes. A final row checks that a corrupted tolerance turns
//! its row red.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use catnet_cli::regress::{run_all, run_one, Outcome, Tolerances};

fn scratch_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("catnet-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).expect("temp dir");
    d
}

fn write_configs(dir: &Path) {
    let graph = r#"{"vertices":[0,1,2],"edges":[[0,0,1],[1,1,0],[2,1,2]]}"#;
    std::fs::write(dir.join("graph.json"), graph).unwrap();
    let pipeline = r#"{
  "experiment": "two-cycle-plus-sink",
  "seed": 7,
  "inputs": {"graph": "graph.json"},
  "options": {"word_length": 4, "max_dim": 2,
              "hopfield": {"steps": 4, "theta_b": 1.0, "eps": 0.1}}
}"#;
    std::fs::write(dir.join("pipeline.json"), pipeline).unwrap();
    let er = r#"{
  "experiment": "er-small",
  "seed": 11,
  "options": {"n": 14, "p": [0.2, 0.5], "trials": 24, "k": 1, "max_dim": 3}
}"#;
    std::fs::write(dir.join("er.json"), er).unwrap();
    let hop = r#"{
  "experiment": "hopfield-small",
  "seed": 5,
  "inputs": {"graph": "graph.json"},
  "options": {"steps": 12}
}"#;
    std::fs::write(dir.join("hopfield.json"), hop).unwrap();
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_catnet")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

/// Runs each command twice through the binary and compares stdout.
fn binary_determinism() -> (bool, String) {
    let dir = scratch_dir();
    write_configs(&dir);
    let mut notes = Vec::new();
    let mut ok = true;
    for cmd in [("pipeline", "pipeline.json"), ("er-ensemble", "er.json"), ("hopfield-run", "hopfield.json")] {
        let cfg = dir.join(cmd.1);
        let args = [cmd.0, "--config", cfg.to_str().unwrap()];
        match (run_bin(&args), run_bin(&args)) {
            (Ok(a), Ok(b)) => {
                let same = a == b && !a.is_empty();
                ok &= same;
                notes.push(format!("{} {}B {}", cmd.0, a.len(), if same { "identical" } else { "DIFFERENT" }));
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                notes.push(format!("{} failed: {}", cmd.0, e.trim()));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    (ok, notes.join(", "))
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let mut outcomes: Vec<Outcome> = run_all(&tol);
    let (bin_ok, bin_note) = binary_determinism();
    if let Some(last) = outcomes.last_mut() {
        last.passed &= bin_ok;
        last.measured = format!("{}; binary: {bin_note}", last.measured);
    }
    for o in &outcomes {
        println!("{o}");
    }
    let corrupted = Tolerances { cocycle: -1.0, ..tol };
    let injected = run_one(3, &corrupted);
    let self_test = !injected.passed;
    println!(
        "{} [--] harness self-test: criterion 3 with tolerance -1 reports {}",
        if self_test { "PASS" } else { "FAIL" },
        if injected.passed { "PASS" } else { "FAIL" }
    );
    let failed = outcomes.iter().filter(|o| !o.passed).count() + usize::from(!self_test);
    println!("{} of {} criteria passed", outcomes.len() - outcomes.iter().filter(|o| !o.passed).count(), outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
