use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dbm_cli::commands;
use dbm_cli::config::RunConfig;

#[derive(Parser)]
#[command(name = "dbm", version, about = "Airfoil design by morphing")]
struct Cli {
    /// TOML configuration layered over the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named preset: desk or paper-recon.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Override a single key, e.g. `--set optimize.ga.population=60`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize and collocate coordinate files into a manifest.
    Ingest { files: Vec<PathBuf> },
    /// Morph each row of a weights CSV.
    Morph { weights: PathBuf },
    /// Fit the target shapes with each configured method.
    Reconstruct,
    /// Two-objective search over the morphing weights.
    Optimize,
    /// NSGA-II on the ZDT test problems.
    BenchmarkZdt,
    /// PCA and k-means over a saved archive.
    Cluster {
        archive: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Objectives and polars for shapes, or for every baseline.
    Evaluate { files: Vec<PathBuf> },
    /// Print the resolved configuration.
    Config,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = RunConfig::load(cli.config.as_deref(), cli.preset.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Command::Cluster { k: Some(k), .. } = cli.command {
        cfg.cluster.k = k;
    }
    cfg.validate()?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global().context("building thread pool")?;
    }

    match &cli.command {
        Command::Ingest { files } => {
            let s = commands::ingest(&cfg, files)?;
            println!("ingested {} file(s), rejected {}; manifest {}", s.written, s.failed.len(), s.manifest.display());
            for (f, m) in &s.failed {
                println!("  {f}: {m}");
            }
        }
        Command::Morph { weights } => {
            let s = commands::morph_rows(&cfg, weights)?;
            println!(
                "{} row(s): {} written ({} repaired), {} rejected",
                s.rows,
                s.written,
                s.repaired,
                s.rejected.len()
            );
            for (r, m) in &s.rejected {
                println!("  row {r}: {m}");
            }
        }
        Command::Reconstruct => {
            for m in commands::reconstruct_targets(&cfg)?.methods {
                println!("{:<12} {}/{} within {} ({:.0}%)", m.method, m.within, m.targets, m.tolerance, m.percent);
            }
        }
        Command::Optimize => {
            let s = commands::optimize(&cfg)?;
            println!("{} generation(s), archive of {} -> {}", s.generations, s.archive_size, s.archive.display());
        }
        Command::BenchmarkZdt => {
            for o in commands::benchmark_zdt(&cfg)? {
                let verdict = if o.passed { "ok" } else { "above threshold" };
                println!("{:<5} deviation {:.5} (threshold {}) {verdict}", o.problem, o.deviation, o.threshold);
            }
        }
        Command::Cluster { archive, .. } => {
            let s = commands::cluster(&cfg, archive)?;
            println!("{} point(s), cluster sizes {:?}", s.points, s.sizes);
            for f in &s.shape_failures {
                println!("  {f}");
            }
        }
        Command::Evaluate { files } => {
            for e in commands::evaluate(&cfg, files)? {
                let o = e.objectives;
                if o.failed {
                    println!("{}: failed", e.name);
                } else {
                    println!("{}: CLD_max {:.2}, delta-alpha {:.2}", e.name, o.cld_max, o.delta_alpha);
                }
            }
        }
        Command::Config => print!("{}", cfg.to_toml()?),
    }
    Ok(())
}
