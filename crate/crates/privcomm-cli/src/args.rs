//! Command-line surface: subcommands, flags, and shared output options.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Parser)]
#[command(
    name = "privcomm",
    version,
    about = "Privacy analyzer for two-party communication protocols"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decide whether a communication matrix is privately computable and
    /// synthesize a lossless protocol when it is.
    AnalyzeMatrix(AnalyzeArgs),
    /// Per-round privacy loss and leakage figures for a protocol.
    Privacy(PrivacyArgs),
    /// Build a named reference construction and report its headline figures.
    Paper(PaperArgs),
    /// Evaluate a construction over a parameter grid, one row per point.
    Sweep(SweepArgs),
}

/// Output options shared by every subcommand.
#[derive(Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Communication matrix JSON file.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Input distribution JSON file for the rectangle report.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Also report, per output value, the heaviest rectangle whose relative
    /// error stays within this bound, plus the widest monochromatic one.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct PrivacyArgs {
    /// Named construction (and, idmin-private, idmin-leaky, disj) or a
    /// protocol tree JSON file.
    #[arg(long)]
    pub protocol: String,
    /// Communication matrix JSON file; file-based protocols only.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Input distribution JSON file (uniform when omitted).
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Input bit width for idmin-private, idmin-leaky, and disj.
    #[arg(long)]
    pub n: Option<usize>,
    /// Leakage parameter for and and idmin-leaky.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Round count override for and, or comma-separated Grover stage
    /// iterations for disj.
    #[arg(long)]
    pub stages: Option<String>,
    /// Cap on simulated register qubits for quantum protocols.
    #[arg(long)]
    pub budget_qubits: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct PaperArgs {
    /// Construction name: and, idmin-private, idmin-leaky, disj.
    pub protocol: String,
    /// Input bit width for idmin-private, idmin-leaky, and disj.
    #[arg(long)]
    pub n: Option<usize>,
    /// Leakage parameter for and and idmin-leaky.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Comma-separated Grover stage iterations override for disj.
    #[arg(long)]
    pub stages: Option<String>,
    /// Evaluate the error on this many sampled input pairs (disj only).
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed; required whenever sampling is requested.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Construction to sweep: and, idmin-private, idmin-leaky, disj.
    #[arg(long)]
    pub protocol: String,
    /// Comma-separated input bit widths.
    #[arg(long)]
    pub n: Option<String>,
    /// Comma-separated leakage parameters.
    #[arg(long)]
    pub delta: Option<String>,
    /// Semicolon-separated Grover stage plans for disj, each a
    /// comma-separated iteration list.
    #[arg(long)]
    pub stages: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}
