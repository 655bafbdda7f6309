use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use voa_core::lattice::LatticeData;
use voa_core::verify::{enumerate_modules, replay_witnesses, run_suite, SuiteConfig, SUITES};

/// Exact verification of Zhu algebra computations for lattice orbifold vertex algebras.
#[derive(Parser)]
#[command(name = "voa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite on a lattice.
    Verify {
        /// Lattice file, e.g. {"gram": [[-2, 0], [0, -2]]}
        #[arg(long)]
        gram: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        /// Weight cutoff for O(V) membership certificates.
        #[arg(long, default_value_t = 8)]
        cutoff: i64,
        /// Number of random instances for the sampling suites.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the twisted-type modules with their top levels and inequivalence witnesses.
    Census {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

fn load_gram(path: &Path) -> Result<LatticeData> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    LatticeData::from_json_str(&text).with_context(|| format!("invalid gram matrix in {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Verify { gram, suite, cutoff, samples, seed, out, format } => {
            let lattice = load_gram(&gram)?;
            let cfg = SuiteConfig { lattice, suite, cutoff, samples, seed };
            let start = Instant::now();
            let report = run_suite(&cfg)?;
            let passed = report.checks.iter().filter(|c| c.pass).count();
            eprintln!("{}: {passed}/{} checks pass in {:.2?}", report.suite, report.checks.len(), start.elapsed());
            let text = match format {
                Format::Json => report.to_json(),
                Format::Md => report.to_markdown(),
            };
            emit(out.as_deref(), &text)?;
            Ok(report.pass)
        }
        Command::Census { gram, out } => {
            let lattice = load_gram(&gram)?;
            let start = Instant::now();
            let census = enumerate_modules(&lattice)?;
            let replay = replay_witnesses(&lattice, &census)?;
            eprintln!(
                "{} modules, witnesses {}, replay {} ({:.2?})",
                census.modules.len(),
                if census.complete { "complete" } else { "incomplete" },
                if replay { "ok" } else { "FAILED" },
                start.elapsed()
            );
            emit(out.as_deref(), &serde_json::to_string_pretty(&census)?)?;
            Ok(replay)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
