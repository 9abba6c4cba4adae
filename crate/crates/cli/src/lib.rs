//! Command-line front end of `ncask`: argument parsing, config files, and
//! CSV/JSON emission. The `ncask` binary is a thin wrapper over [`run`].

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Bad flags, config or inputs; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "ncask",
    version,
    about = "Coded noncoherent OOK over AWGN: ML decoding, bounds, Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone)]
pub struct CodeArgs {
    /// Octal generators, e.g. "133,171"
    #[arg(long)]
    code: Option<String>,
    /// Constraint length
    #[arg(long = "K", visible_alias = "constraint-length")]
    constraint_length: Option<usize>,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Manifest path (defaults to <out>.manifest.json when --out is given)
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Monte Carlo BER sweep; CSV `ebno_db,ber,bits,errors,ci_low,ci_high`
    Sim {
        /// Flat JSON config mirroring the sweep fields; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        code: CodeArgs,
        /// soft-exact | soft-approx | hard | uncoded-hard
        #[arg(long)]
        decoder: Option<String>,
        /// Eb/N0 points in dB: start:step:stop, a comma list, or one value
        #[arg(long)]
        ebno: Option<String>,
        /// Master seed (falls back to NCASK_SEED, then 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Information bits per frame (default 1000)
        #[arg(long)]
        frame_bits: Option<usize>,
        /// Information-bit budget per point (default 1e8)
        #[arg(long)]
        max_bits: Option<u64>,
        /// Stop a point after this many bit errors (default 100, at least 20)
        #[arg(long)]
        target_errors: Option<u64>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form curves; CSV `ebno_db,uncoded,soft_bound,hard_bound`
    Bound {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        dfree: Option<usize>,
        #[arg(long)]
        bdfree: Option<f64>,
        /// Code rate, required with --dfree/--bdfree
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value = "0:0.5:14")]
        ebno: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Free distance and weight spectrum as JSON
    Spectrum {
        #[command(flatten)]
        code: CodeArgs,
        /// Weight cap (default 2 K n)
        #[arg(long)]
        dmax: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Branch metrics of one simulated frame; CSV `index,eta,m0,m1`
    MetricTable {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        ebno: f64,
        /// exact | approx
        #[arg(long, default_value = "exact")]
        variant: String,
        #[arg(long, default_value_t = 16)]
        info_bits: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampled vs. Gaussian-approximation moments of a sum of d Rayleigh envelopes
    ApproxCheck {
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value = "0:2:12")]
        ebno: String,
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Runs one parsed command. Bodies go to `--out` when given, otherwise to
/// `stdout`.
pub fn run(command: Command, stdout: &mut dyn Write) -> anyhow::Result<()> {
    commands::run(command, stdout)
}

/// Parses `args` (program name first) and runs the command. Parse failures
/// come back as [`UsageError`].
pub fn run_args<I, T>(args: I, stdout: &mut dyn Write) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| UsageError(e.to_string()))?;
    run(cli.command, stdout)
}
