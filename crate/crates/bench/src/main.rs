use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use freud::ortho::RecurrenceTable;
use freud::probe::{growth_per_octave, inequality_probe, ProbeConfig, ProbeKind, ProbeRow};
use freud::{NormIndex, WeightSpec};
use freud_bench::cache::TableCache;
use freud_bench::config::ExperimentConfig;
use freud_bench::experiment::run_experiment;
use freud_bench::export::export_grids;

#[derive(Parser)]
#[command(name = "bench", about = "Convergence sweeps, grid export and inequality probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep; exit 0 on pass, 2 if inconclusive, 1 on failure.
    Run {
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the sample grid of every sweep value as CSV.
    Grids {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-polynomial probe of a weighted polynomial inequality.
    Probe {
        /// bernstein, nikolskii_up, nikolskii_down, restricted_support or marcinkiewicz.
        kind: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
    },
}

fn norm(v: f64) -> anyhow::Result<NormIndex> {
    Ok(if v.is_infinite() { NormIndex::Infinity } else { NormIndex::finite(v)? })
}

fn spread(r: &ProbeRow) -> f64 {
    r.max_ratio / r.min_ratio
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> anyhow::Result<u8> {
    match Cli::parse().command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let cache = TableCache::new(cfg.output.cache.clone());
            let report = run_experiment(&cfg, &cache)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            report.write(&dir)?;
            for f in &report.fits {
                let slope = f.slope.map_or("-".into(), |s| format!("{s:.3}"));
                let r2 = f.r_squared.map_or("-".into(), |s| format!("{s:.3}"));
                println!("{:<14} slope {slope:>7}  R² {r2:>5}  {:?}: {}", f.function, f.verdict, f.note);
            }
            println!(
                "predicted exponent {:.3} ({}), tolerance {}, samples within budget: {}",
                report.predicted_exponent, report.exponent_kind, report.tolerance, report.samples_within_budget
            );
            println!("verdict {:?}; report in {}", report.verdict, dir.display());
            Ok(report.exit_code() as u8)
        }
        Command::Grids { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let cache = TableCache::new(cfg.output.cache.clone());
            let dir = out.unwrap_or_else(|| cfg.output.dir.join("grids"));
            for p in export_grids(&cfg, &cache, &dir)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
        Command::Probe { kind, p, q, degrees, trials, seed, lambda, a } => {
            let Some(kind) = ProbeKind::parse(&kind) else { bail!("unknown probe `{kind}`") };
            let spec = WeightSpec::pure(lambda, a, 1)?;
            let top = degrees.iter().copied().max().unwrap_or(0);
            let table = Arc::new(RecurrenceTable::for_v(&spec, 2 * top + 64)?);
            let mut cfg = ProbeConfig::new(kind, norm(p)?, norm(q)?, degrees);
            cfg.trials = trials;
            cfg.seed = seed;
            let rows = inequality_probe(&table, &spec, &cfg)?;
            let growth = if kind == ProbeKind::Marcinkiewicz {
                growth_per_octave(&rows, spread)
            } else {
                growth_per_octave(&rows, |r| r.max_ratio)
            };
            let json: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "kind": r.kind, "p": r.p, "q": r.q, "m": r.m,
                        "max_ratio": r.max_ratio, "min_ratio": r.min_ratio,
                        "trials": r.trials, "seed": r.seed,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "rows": json, "growth_per_octave": growth }))?);
            Ok(if growth < 0.1 { 0 } else { 1 })
        }
    }
}
