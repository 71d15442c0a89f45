//! `multistable` command-line front end.
//!
//! Exit codes: 0 success, 1 simulation or check failure, 2 invalid input.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

pub mod config;
mod estimate;
mod simulate;
mod verify;

pub use config::RunConfig;
pub use estimate::run_estimate;
pub use simulate::run_simulate;
pub use verify::{run_verify, SUITES};

#[derive(Debug)]
pub enum CliError {
    /// Bad config, arguments or input files.
    Config(String),
    /// Failure while simulating or checking.
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid input: {m}"),
            CliError::Run(m) => write!(f, "run failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<multistable::Error> for CliError {
    fn from(e: multistable::Error) -> Self {
        use multistable::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::OutOfRange { .. }
            | E::OutsideDomain { .. }
            | E::Parse(_)
            | E::EmptySample
            | E::Insufficient(_)
            | E::MemoryCap { .. } => CliError::Config(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

pub(crate) fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Run(format!("{}: {e}", path.display()))
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `files` under `dir`, creating it first.
pub(crate) fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, bytes) in files {
        let p = dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| io_err(&p, e))?;
    }
    Ok(())
}

#[derive(Parser, Debug)]
#[command(name = "multistable", version, about = "Simulate and check multistable processes")]
struct Cli {
    /// Worker threads for replica generation.
    #[arg(long, global = true, env = "MULTISTABLE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate sample paths and write CSV files plus a manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run named verification checks and write a report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated check names.
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate local h and alpha from paths.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// Glob of path CSV files; the configured ensemble is simulated when absent.
        #[arg(long)]
        paths: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("invalid input: --threads must be at least 1");
            return 2;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Simulate { config, out } => RunConfig::load(config).and_then(|c| run_simulate(&c, out)),
        Command::Verify { config, suite, out } => {
            RunConfig::load(config).and_then(|c| run_verify(&c, suite, out)).and_then(|passed| {
                if passed {
                    Ok(())
                } else {
                    Err(CliError::Run("one or more checks failed".into()))
                }
            })
        }
        Command::Estimate { config, paths, out } => {
            RunConfig::load(config).and_then(|c| run_estimate(&c, paths.as_deref(), out))
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
