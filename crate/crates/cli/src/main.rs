// SPDX-License-Identifier: Apache-2.0

//! `renewal`: config-driven experiments on renewal-event quantum dynamics.

mod config;
mod experiments;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{ConfigError, Setup};
use experiments::{ExperimentRegistry, RunError};

const EXIT_FAILED_GATE: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "renewal", version, about = "Renewal-event open quantum dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write its CSV.
    Run(RunArgs),
    /// List the available experiments.
    List {
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file (same as --config).
    #[arg(value_name = "CONFIG", conflicts_with = "config")]
    path: Option<PathBuf>,
    #[arg(long, value_name = "CONFIG")]
    config: Option<PathBuf>,
    /// CSV destination, overriding the config's `output`.
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Replaces `ensemble.seed`.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Debug)]
enum Failure {
    Schema(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Schema(_) => EXIT_SCHEMA,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Io(e.to_string()),
            ConfigError::Schema(msg) => Failure::Schema(msg),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => c.into(),
            RunError::Numerical(msg) => Failure::Numerical(msg),
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    experiment: &'a str,
    config: String,
    config_sha256: String,
    output: String,
    columns: &'a [String],
    rows: usize,
    seed: Option<u64>,
    seed_override: Option<u64>,
    threads: usize,
    versions: Versions,
    wall_time_seconds: f64,
    passed: Option<bool>,
    notes: &'a [String],
}

#[derive(Serialize)]
struct Versions {
    renewal_cli: &'static str,
    renewal_core: &'static str,
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn run(args: RunArgs) -> Result<bool, Failure> {
    let started = Instant::now();
    let path = args
        .path
        .or(args.config)
        .ok_or_else(|| Failure::Schema("a config file is required (positional or --config)".into()))?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Failure::Schema("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Numerical(format!("cannot size the worker pool: {e}")))?;
    }
    let loaded = config::load(&path)?;
    let mut cfg = loaded.config;
    if let (Some(seed), Some(ens)) = (args.seed_override, cfg.ensemble.as_mut()) {
        ens.seed = seed;
    }
    let out = args
        .out
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Failure::Schema("no output path: set `output` in the config or pass --out".into()))?;
    let registry = ExperimentRegistry::with_builtins();
    let experiment = registry.get(&cfg.experiment).ok_or_else(|| {
        let known: Vec<_> = registry.names().collect();
        Failure::Schema(format!("unknown experiment `{}` (known: {})", cfg.experiment, known.join(", ")))
    })?;
    let setup = Setup::new(cfg)?;
    experiment.check(&setup)?;
    log::info!("running {} from {}", experiment.name(), path.display());
    let report = experiment.run(&setup)?;

    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    let file = File::create(&out).map_err(|e| io_failure(&out, e))?;
    report.table.write(BufWriter::new(file)).map_err(|e| io_failure(&out, e))?;

    let meta = Metadata {
        experiment: experiment.name(),
        config: path.display().to_string(),
        config_sha256: format!("{:x}", Sha256::digest(&loaded.bytes)),
        output: out.display().to_string(),
        columns: &report.table.header,
        rows: report.table.rows.len(),
        seed: setup.config.ensemble.map(|e| e.seed),
        seed_override: args.seed_override,
        threads: rayon::current_num_threads(),
        versions: Versions {
            renewal_cli: env!("CARGO_PKG_VERSION"),
            renewal_core: renewal_core::VERSION,
        },
        wall_time_seconds: started.elapsed().as_secs_f64(),
        passed: report.passed,
        notes: &report.notes,
    };
    let meta_path = sidecar_path(&out);
    let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    text.push('\n');
    std::fs::write(&meta_path, text).map_err(|e| io_failure(&meta_path, e))?;

    for note in &report.notes {
        eprintln!("{note}");
    }
    eprintln!("wrote {} ({} rows)", out.display(), report.table.rows.len());
    Ok(report.passed.unwrap_or(true))
}

fn list(json: bool) -> std::io::Result<()> {
    let listing = ExperimentRegistry::with_builtins().listing();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if json {
        serde_json::to_writer_pretty(&mut out, &listing)?;
        writeln!(out)?;
    } else {
        let width = listing.iter().map(|l| l.name.len()).max().unwrap_or(0);
        for l in &listing {
            writeln!(out, "{:width$}  {}", l.name, l.description)?;
            writeln!(out, "{:width$}  plot: {}", "", l.figure)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_SCHEMA } else { 0 });
        }
    };
    match cli.command {
        Command::List { json } => match list(json) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_IO)
            }
        },
        Command::Run(args) => match run(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("error: the experiment's checks failed");
                ExitCode::from(EXIT_FAILED_GATE)
            }
            Err(f) => {
                let msg = match &f {
                    Failure::Schema(m) => format!("invalid config: {m}"),
                    Failure::Numerical(m) | Failure::Io(m) => m.clone(),
                };
                eprintln!("error: {msg}");
                ExitCode::from(f.code())
            }
        },
    }
}
