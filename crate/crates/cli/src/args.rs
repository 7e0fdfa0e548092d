use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qes", version, about = "QES conditions of the PT-symmetric quartic oscillator with Coulomb and centrifugal terms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Every simultaneous (E, F) pair at finite ℓ.
    Solve(SolveArgs),
    /// Strong-core multiplets t_k = N − 3k, their kernels and leading-order spectra.
    Asymptotic(AsymptoticArgs),
    /// One branch followed across a geometric grid of ℓ.
    Sweep(SweepArgs),
    /// Re-checks a JSON record emitted by `solve`.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Continuation,
    Scan,
}

/// Couplings either as internal (β, γ, ℓ) or as model (B, C, G, L); rationals such as `3/4` are exact.
#[derive(Args, Debug, Clone)]
pub struct Couplings {
    #[arg(long = "ell", allow_hyphen_values = true, conflicts_with_all = ["g", "l"])]
    pub ell: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["b", "c"])]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["b", "c"])]
    pub gamma: Option<String>,
    #[arg(long = "B", alias = "b", id = "b", allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long = "C", alias = "c", id = "c", allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long = "G", alias = "g", id = "g", allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "L", alias = "l", id = "l", allow_hyphen_values = true)]
    pub l: Option<String>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[command(flatten)]
    pub couplings: Couplings,
    #[arg(long, default_value_t = 64)]
    pub precision: u32,
    #[arg(long, value_enum, default_value_t = StrategyArg::Continuation)]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub real_only: bool,
}

#[derive(Args, Debug)]
pub struct AsymptoticArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub ell: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub beta: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub gamma: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// `lo:hi:points`, geometric.
    #[arg(long = "ell-range")]
    pub ell_range: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub beta: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub gamma: String,
    #[arg(long, default_value_t = 128)]
    pub precision: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub path: PathBuf,
    /// Relative tolerance for the residual and ODE checks.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}
