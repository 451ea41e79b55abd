use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use catnet_cli::commands::{self, ErOptions};
use catnet_cli::config::ExperimentConfig;
use catnet_cli::{pipeline, regress};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "catnet", version, about = "Experiments on networks, codes, Hopfield dynamics and integrated information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Categorical and classical Hopfield trajectories (CSV).
    HopfieldRun(Io),
    /// Integrated information along a Hopfield trajectory (CSV).
    HopfieldIi(Io),
    /// Integrated information of a joint distribution (JSON).
    IiCompute(Io),
    /// Betti numbers of random clique complexes (CSV, summary JSON in the output directory).
    ErEnsemble(Io),
    /// Flag complex counts and Betti numbers of a graph (JSON).
    CliqueHomology(Io),
    /// Probabilities and nerve homology of a code (JSON).
    CodeStats(Io),
    /// Architecture of a graph with per-vertex parts (JSON).
    TransitionsBuild(Io),
    /// All stages end to end with artifact hashes (JSON).
    Pipeline(Io),
    /// Runs the acceptance checks; nonzero exit on any failure.
    Regress {
        /// Run only these criteria (1-12).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_config<T: DeserializeOwned>(io: &Io, f: fn(&ExperimentConfig<T>) -> Result<String>) -> Result<()> {
    let cfg = ExperimentConfig::<T>::load(&io.config)?;
    emit(io.out.as_deref(), &f(&cfg)?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::HopfieldRun(io) => with_config(&io, commands::hopfield_run)?,
        Command::HopfieldIi(io) => with_config(&io, commands::hopfield_ii)?,
        Command::IiCompute(io) => with_config(&io, commands::ii_compute)?,
        Command::CliqueHomology(io) => with_config(&io, commands::clique_homology)?,
        Command::CodeStats(io) => with_config(&io, commands::code_stats)?,
        Command::TransitionsBuild(io) => with_config(&io, commands::transitions_build)?,
        Command::Pipeline(io) => with_config(&io, pipeline::pipeline)?,
        Command::ErEnsemble(io) => {
            let cfg = ExperimentConfig::<ErOptions>::load(&io.config)?;
            let e = commands::er_ensemble(cfg.seed, &cfg.options)?;
            if let Some(dir) = &cfg.output_dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join(format!("{}_summary.json", cfg.experiment)), e.summary_json())?;
            }
            emit(io.out.as_deref(), &e.to_csv())?;
        }
        Command::Regress { only } => {
            let tol = regress::Tolerances::default();
            let ids: Vec<usize> = if only.is_empty() { (1..=regress::NAMES.len()).collect() } else { only };
            let mut all_ok = true;
            for id in ids {
                anyhow::ensure!((1..=regress::NAMES.len()).contains(&id), "no criterion {id}");
                let o = regress::run_one(id, &tol);
                println!("{o}");
                all_ok &= o.passed;
            }
            return Ok(all_ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
