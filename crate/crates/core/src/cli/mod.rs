//! The `ucorr` command line.
//!
//! Exit codes: 0 success, 1 an invariant violation was detected, 2 usage or
//! input error. `UCORR_THREADS` caps the worker pool.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "ucorr", version, about = "Unitary correlations, embezzlement and cross norms on M_n ⊗ M_m")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the command's comparison tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (stdout when omitted); a directory for `report`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence table of the embezzlement protocol for r = 1..R.
    Embezzle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        r: usize,
        /// Target vector JSON `{dim, entries}`; maximally entangled if omitted.
        #[arg(long)]
        alpha: Option<PathBuf>,
        /// Also cross-check every r against the dense state-vector model.
        #[arg(long)]
        dense: bool,
    },
    /// Injective, operator and projective bounds for a matrix.
    Norm {
        #[command(flatten)]
        common: Common,
        /// Matrix JSON `{rows, cols, entries}`.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Choi certificate for membership in the operator-norm ball.
    QmaxCert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Non-signalling check of a box `{n, m, p}`; the PR box if omitted.
    Nsb {
        #[command(flatten)]
        common: Common,
        #[arg(long = "box")]
        box_file: Option<PathBuf>,
    },
    /// Regenerates every desk-scale result as one JSON and one CSV file.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        r: usize,
    },
}

/// Everything a command needs, resolved from the arguments.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn from_common(c: &Common) -> Result<Self, String> {
        if let Some(t) = c.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        Ok(Self {
            n: c.n,
            m: c.m,
            seed: c.seed,
            tol: c.tol,
            format: c.format,
            out: c.out.clone(),
        })
    }
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("UCORR_THREADS") {
        let threads: usize = v
            .parse()
            .map_err(|_| format!("UCORR_THREADS must be a positive integer, got {v:?}"))?;
        if threads == 0 {
            return Err("UCORR_THREADS must be at least 1".into());
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}
