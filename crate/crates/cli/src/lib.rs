//! Command-line frontend: configuration, command dispatch and report emission.
//!
//! Usage: `pspec <command> --config <path> [--out <dir>] [--seed <u64>]`.
//! Every run writes `report.json` (a run block followed by check blocks) plus
//! the command's CSV tables and OFF meshes into the output directory.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

use config::{parse_pairs, validate, Command, ConfigError, RunConfig};
use report::{json_bytes, run_block, CheckBlock};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] pspec_core::Error),
    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Unsupported(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "pspec", version, about = "p-Laplacian spectral geometry experiments")]
pub struct Cli {
    /// Pipeline to run.
    #[arg(value_enum)]
    pub command: Command,
    /// Path of the `key = value` configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding the `output` key.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for random batteries, overriding the `seed` key.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Result of a completed run.
pub struct RunOutcome {
    pub blocks: Vec<CheckBlock>,
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.blocks.iter().all(|b| b.pass)
    }
}

/// Reads the configuration and applies command-line overrides. The
/// positional command must agree with a `command` key in the file if present.
pub fn load_config(cli: &Cli) -> Result<(RunConfig, String), CliError> {
    let text = fs::read_to_string(&cli.config).map_err(|e| CliError::Io(format!("{}: {e}", cli.config.display())))?;
    let mut pairs = parse_pairs(&text)?;
    let name = cli.command.name().to_string();
    match pairs.get("command") {
        Some((line, c)) if *c != name => {
            return Err(ConfigError::Invalid {
                key: "command".into(),
                msg: format!("line {line}: file says {c:?} but {name:?} was requested"),
            }
            .into())
        }
        Some(_) => {}
        None => {
            pairs.insert("command".into(), (0, name));
        }
    }
    if let Some(seed) = cli.seed {
        pairs.insert("seed".into(), (0, seed.to_string()));
    }
    if let Some(out) = &cli.out {
        pairs.insert("output".into(), (0, out.display().to_string()));
    }
    Ok((validate(pairs)?, text))
}

/// Runs the configured pipeline and writes every artifact into the output directory.
pub fn run(config: &RunConfig, text: &str) -> Result<RunOutcome, CliError> {
    let out = match config.command {
        Command::Mesh => commands::mesh(config)?,
        Command::Eigen => commands::eigen(config)?,
        Command::Symmetrize => commands::symmetrize_cmd(config)?,
        Command::Verify => commands::verify(config)?,
        Command::Sweep => commands::sweep(config)?,
        Command::Oracle => commands::oracle(config)?,
    };
    let mut blocks = vec![run_block(config, text)];
    blocks.extend(out.blocks);
    let mut files = out.files;
    files.push(("report.json".into(), json_bytes(&blocks)?));
    fs::create_dir_all(&config.output)?;
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = config.output.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
    }
    Ok(RunOutcome { blocks, written })
}

fn describe(b: &CheckBlock) -> String {
    let num = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
    format!("{} {:<32} lhs={} rhs={}", if b.pass { "PASS" } else { "FAIL" }, b.name, num(b.lhs), num(b.rhs))
}

/// Entry point shared by the binary: returns the process exit code, 0 when
/// every check passes, 1 when any fails and 2 on errors.
pub fn main_with_args<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = load_config(&cli).and_then(|(cfg, text)| run(&cfg, &text));
    match outcome {
        Ok(o) => {
            for b in o.blocks.iter().skip(1) {
                println!("{}", describe(b));
            }
            let passed = o.blocks.iter().filter(|b| b.pass).count();
            let report = o.written.last().map(|p| p.display().to_string()).unwrap_or_default();
            println!("{passed}/{} checks passed; report: {report}", o.blocks.len());
            if o.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Writes `text` to `dir/name`, for tests and scripts that build configs on the fly.
pub fn write_config(dir: &Path, name: &str, text: &str) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}
