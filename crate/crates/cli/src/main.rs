//! Command-line surface for the murmuration pipeline.
//!
//! Every run resolves its configuration into a manifest (JSON) that can
//! be replayed bit-exactly with `murmur rerun`. Errors carry a stable
//! machine-readable code on stderr and a nonzero exit.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::Manifest;

#[derive(Parser, Debug)]
#[command(name = "murmur", version, about = "Frobenius traces, murmurations and ML probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// CSV output path (defaults to stdout for tabular commands)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// SVG plot output path
    #[arg(long)]
    plot: Option<std::path::PathBuf>,
    /// Write the resolved run manifest to this path
    #[arg(long)]
    manifest: Option<std::path::PathBuf>,
    /// Worker threads (0 = machine parallelism; 1 = sequential reference path)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-prime point counts and aggregate discrepancy of one curve
    Ap {
        /// Coefficients a1,a2,a3,a4,a6
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        curve: Vec<i64>,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Remainder bias of odd primes mod 4
    Chebyshev {
        #[arg(long, default_value_t = 100)]
        limit: u64,
        /// Report the first k primes with strictly positive aggregate
        #[arg(long)]
        crossings: Option<usize>,
        /// Modulus is accepted as a flag for symmetry; only 4 is supported
        #[arg(long, default_value_t = 4)]
        modulus: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Select a dataset S(parity, interval) and export its a_p matrix
    Dataset {
        #[arg(long, env = "MURMUR_CORPUS")]
        corpus: std::path::PathBuf,
        /// Closed conductor interval lo:hi
        #[arg(long)]
        interval: String,
        #[arg(long)]
        parity: u8,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Murmuration averages of both parities over a conductor window
    Average {
        #[arg(long, env = "MURMUR_CORPUS")]
        corpus: std::path::PathBuf,
        /// Closed conductor interval lo:hi
        #[arg(long)]
        interval: String,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        /// Rescale the prime axis to x = p / lo (requires pmax <= lo)
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// PCA of the a_p matrix over a conductor window
    Pca {
        #[arg(long, env = "MURMUR_CORPUS")]
        corpus: std::path::PathBuf,
        #[arg(long)]
        interval: String,
        #[arg(long, default_value_t = 4096)]
        pmax: u64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV of the first principal direction paired with primes
        #[arg(long)]
        profile: Option<std::path::PathBuf>,
        /// Model dump (CSV) plus a JSON sidecar next to it
        #[arg(long)]
        model: Option<std::path::PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Train the softmax rank classifier
    Train {
        #[arg(long, env = "MURMUR_CORPUS")]
        corpus: std::path::PathBuf,
        /// Rank labels to include, e.g. 0,1
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        classes: Vec<u32>,
        /// Cap on classes sampled per rank (0 = all)
        #[arg(long, default_value_t = 0)]
        per_class: usize,
        #[arg(long, default_value_t = 4096)]
        pmax: u64,
        #[arg(long, default_value_t = 0.1)]
        learning_rate: f64,
        #[arg(long, default_value_t = 500)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        train_fraction: f64,
        /// Disable the 1/sqrt(p) column scaling
        #[arg(long)]
        no_scale: bool,
        /// Metrics JSON output path (defaults to stdout)
        #[arg(long)]
        metrics: Option<std::path::PathBuf>,
        /// Model dump (CSV) plus a JSON sidecar next to it
        #[arg(long)]
        model: Option<std::path::PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Replay a previously written manifest bit-exactly
    Rerun { manifest: std::path::PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rerun { manifest } => manifest::rerun(&manifest),
        other => Manifest::from_command(&other).and_then(|m| commands::run(&m)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err
                .downcast_ref::<murmur_core::Error>()
                .map(|e| e.code())
                .unwrap_or("E_RUNTIME");
            eprintln!("error[{code}]: {err:#}");
            ExitCode::FAILURE
        }
    }
}
