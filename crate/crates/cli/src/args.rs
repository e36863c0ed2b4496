use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use widthcalc::oracle::Fault;

#[derive(Debug, Parser)]
#[command(name = "widthcalc", version, about = "Exact order exponents of Kolmogorov widths of anisotropic Sobolev classes")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Read `key = value` defaults from a file. Flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimise the exponent functional and compare with the explicit formulas.
    Exponent(SpecArgs),
    /// Classify the regime and evaluate the explicit formulas only.
    Regime(SpecArgs),
    /// Width order of an intersection of finite-dimensional balls.
    Finite(FiniteArgs),
    /// Vary one parameter over a range and write one CSV row per step.
    Sweep(SweepArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Dimension; optional, checked against the lengths of --p and --r.
    #[arg(long)]
    pub d: Option<usize>,
    /// Integrability exponents, comma separated rationals such as `3,4/3`.
    #[arg(long)]
    pub p: Option<String>,
    /// Smoothness exponents.
    #[arg(long)]
    pub r: Option<String>,
    /// Target space exponent.
    #[arg(long)]
    pub q: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FiniteArgs {
    /// Ambient dimension N.
    #[arg(long = "N", value_name = "N")]
    pub big_n: Option<u64>,
    /// Width index n.
    #[arg(long = "n")]
    pub n: Option<u64>,
    /// Target norm, a rational or `inf`.
    #[arg(long)]
    pub q: Option<String>,
    /// Balls as `p:nu` pairs, for example `inf:1/4,1:1`.
    #[arg(long)]
    pub balls: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// `q`, `p_j`, `r_j` (1-based `j`) or `n-budget`.
    #[arg(long)]
    pub varying: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Block `m_1,...,m_d` for an `n-budget` sweep, which varies `log2 n`.
    #[arg(long)]
    pub block: Option<String>,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Specs per regime stratum and certificate count.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Also write the report to this file.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Corrupt the objective handed to the LP, to check that verification fails.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    FlipSign,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::FlipSign => Fault::FlipSign,
        }
    }
}
