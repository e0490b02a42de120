use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use effshock::harness::{
    emit_outputs, entropy_study, expand_sweep, overlay, read_speeds, run_experiment_with,
    run_sweep, summarize, summarize_records, ExperimentConfig, SweepSpec,
};
use effshock::homogenize::effective_parameters;
use effshock::rh::predict;
use effshock::solver::SnapshotFormat;

#[derive(Parser)]
#[command(name = "effshock", version, about = "Shock speeds in periodic nonlinear media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Binary,
}

impl From<Format> for SnapshotFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => SnapshotFormat::Csv,
            Format::Binary => SnapshotFormat::Binary,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the effective medium parameters.
    Effective { config: PathBuf },
    /// Print the predicted shock speed and the threshold speeds.
    PredictSpeed { config: PathBuf },
    /// Run one experiment and print its record.
    Simulate {
        config: PathBuf,
        /// Directory for snapshot files.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Directory for speeds.csv, the entropy trace and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every configuration of a sweep file.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Entropy loss of one configuration at several resolutions.
    Entropy {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        resolutions: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scatter statistics of a speeds.csv table.
    Compare { records: PathBuf },
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Effective { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            print_json(&effective_parameters(&cfg.spec())?)
        }
        Command::PredictSpeed { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            print_json(&predict(&cfg.spec(), &cfg.law, cfg.sigma_l, cfg.sigma_r, cfg.u_r)?)
        }
        Command::Simulate {
            config,
            snapshots,
            format,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            if let Some(dir) = &snapshots {
                ensure_dir(dir)?;
            }
            let snap = snapshots.as_deref().map(|d| (d, format.into()));
            let record = run_experiment_with(&cfg, 0, snap)?;
            if let Some(dir) = &out {
                emit_outputs(std::slice::from_ref(&record), dir)?;
                if let Some(front) = &record.front {
                    front.write_csv(BufWriter::new(File::create(dir.join("front.csv"))?))?;
                }
                if cfg.diagnostics.overlay {
                    let ov = overlay(&cfg)?;
                    ov.write_csv(BufWriter::new(File::create(dir.join("overlay.csv"))?))?;
                }
            }
            print_json(&record)
        }
        Command::Sweep { config, out, jobs } => {
            let spec = SweepSpec::load(&config)?;
            let configs = expand_sweep(&spec)?;
            eprintln!("sweep: {} configurations", configs.len());
            let results = match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()?
                    .install(|| run_sweep(&configs)),
                None => run_sweep(&configs),
            };
            let mut records = Vec::with_capacity(results.len());
            for (i, r) in results.into_iter().enumerate() {
                records.push(r.with_context(|| format!("configuration {i}"))?);
            }
            let written = emit_outputs(&records, &out)?;
            eprintln!("wrote {} files to {}", written.len(), out.display());
            print_json(&summarize_records(&records))
        }
        Command::Entropy {
            config,
            resolutions,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let study = entropy_study(&cfg, &resolutions)?;
            println!("t_probe = {}", study.t_probe);
            println!("{:>12} {:>14}", "resolution", "entropy_loss");
            for (r, l) in study.resolutions.iter().zip(&study.losses) {
                println!("{r:>12} {l:>14.6e}");
            }
            if let Some(c) = study.classification {
                println!("classification: {}", c.name());
            }
            if let Some(dir) = &out {
                ensure_dir(dir)?;
                for (r, t) in study.resolutions.iter().zip(&study.traces) {
                    let p = dir.join(format!("entropy_res{r}.csv"));
                    t.write_csv(BufWriter::new(File::create(p)?))?;
                }
            }
            Ok(())
        }
        Command::Compare { records } => {
            let file = File::open(&records).with_context(|| format!("opening {}", records.display()))?;
            let rows = read_speeds(BufReader::new(file))?;
            if rows.is_empty() {
                bail!("{} holds no records", records.display());
            }
            print_json(&summarize(&rows))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
