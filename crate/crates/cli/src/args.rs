use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "jointspec", version, about = "Joint spectra and LDGM ensemble analysis for linear codes over F_q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Joint, marginal, conditional and kernel spectra of a generator matrix.
    Spectrum(SpectrumArgs),
    /// Sample a regular LDGM code.
    Ldgm(LdgmArgs),
    /// Sample a uniform random linear code.
    Rlc(RlcArgs),
    /// Tabulate the exponent bound δ_d(x, y).
    DeltaD(DeltaArgs),
    /// Search for the smallest check degree d₀(γ, δ) at a fixed ratio c/d.
    D0(D0Args),
    /// Exact full-rank probability of a random matrix and its lower bounds.
    Rank(RankArgs),
    /// Finite-size goodness functionals of an ensemble's exact expectation.
    Goodness(GoodnessArgs),
    /// Compare exact LDGM α against the δ_d bound for every type pair.
    LdgmBound(LdgmBoundArgs),
    /// Monte Carlo estimates with standard errors.
    Mc(McArgs),
    /// Run the invariant suite; exits 4 if anything fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest sequence space q^n enumerated exhaustively.
    #[arg(long, default_value_t = 1 << 20)]
    pub limit: u64,
    /// Largest number of ensemble realizations enumerated exhaustively.
    #[arg(long, default_value_t = 1 << 20)]
    pub max_realizations: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    /// Generator matrix in the `q m n` text format.
    #[arg(long)]
    pub matrix: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LdgmArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the generator in matrix text format here.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    /// Include the sampled code's exact joint spectrum.
    #[arg(long)]
    pub spectrum: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RlcArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[arg(long)]
    pub spectrum: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DeltaArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub d: usize,
    /// Grid step for x and y.
    #[arg(long, default_value_t = 0.1)]
    pub grid: f64,
    /// Evaluate a single point instead of a grid (requires --y).
    #[arg(long, requires = "y")]
    pub x: Option<f64>,
    #[arg(long, requires = "x")]
    pub y: Option<f64>,
    /// Also report the supremum over x < 1 − γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct D0Args {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub delta: f64,
    /// Numerator of the fixed ratio c/d.
    #[arg(long, default_value_t = 1)]
    pub c: i64,
    /// Denominator of the fixed ratio c/d.
    #[arg(long, default_value_t = 2)]
    pub d: i64,
    #[arg(long, default_value_t = 16)]
    pub d_max: usize,
    #[arg(long, default_value_t = 0.05)]
    pub grid: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RankArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Also estimate the rate from this many sampled matrices.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Rlc,
    Chk,
    ChkParallel,
    RepParallel,
    Ldgm,
}

/// An ensemble given either by flags or by a JSON ensemble file.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EnsembleArgs {
    #[arg(long, value_enum, conflicts_with_all = ["spec", "matrix"])]
    pub kind: Option<KindArg>,
    /// Ensemble description as JSON (`{"kind": {...}, "seed": ...}`).
    #[arg(long, conflicts_with = "matrix")]
    pub spec: Option<PathBuf>,
    /// A single fixed code in matrix text format.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub c: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GoodnessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LdgmBoundArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimand {
    Spectrum,
    Uniformity,
    Rank,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct McArgs {
    #[arg(long, value_enum, default_value = "spectrum")]
    pub estimand: Estimand,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Uniform inputs drawn per sampled code; every input when omitted.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Fixed input for the uniformity estimand, e.g. `1,0,0`.
    #[arg(long)]
    pub input: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Spectrum(a) => &a.output,
            Command::Ldgm(a) => &a.output,
            Command::Rlc(a) => &a.output,
            Command::DeltaD(a) => &a.output,
            Command::D0(a) => &a.output,
            Command::Rank(a) => &a.output,
            Command::Goodness(a) => &a.output,
            Command::LdgmBound(a) => &a.output,
            Command::Mc(a) => &a.output,
            Command::Verify(a) => &a.output,
        }
    }
}
