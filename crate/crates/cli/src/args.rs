use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kacmat::ensembles::EnsembleKind;
use kacmat::mu::{parse_complex, Mu};
use kacmat::oracles::HoleRegime;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "kacmat",
    version,
    about = "Random UA matrices, random Kac series and their correlation functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues of sampled matrices as `sample,re,im`.
    Sample(SampleArgs),
    /// Roots of sampled random series as `sample,re,im`.
    KacRoots(KacRootsArgs),
    /// Radial density estimate against its closed form.
    Density(DensityArgs),
    /// Two-point function estimate at a pair of points against its closed form.
    Rho2(Rho2Args),
    /// Empirical hole probability against its closed form.
    Hole(HoleArgs),
    /// Evaluate a closed form on a grid or at given points.
    Oracle(OracleArgs),
    /// Algebraic identity suite and cross-formula checks at random points.
    Validate(ValidateArgs),
    /// Sum-rule defect of the truncated correlations.
    Sumrule(SumruleArgs),
    /// Recompute a saved density, rho2 or hole report from saved spectra.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Output format; CSV unless stated otherwise by the command.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ExecArgs {
    /// Worker threads; outputs do not depend on it.
    #[arg(long, env = "KACMAT_WORKERS")]
    pub workers: Option<usize>,
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn mu(s: &str) -> Result<Mu, String> {
    s.parse().map_err(|e: kacmat::error::Error| e.to_string())
}

fn ensemble(s: &str) -> Result<EnsembleKind, String> {
    s.parse().map_err(|e: kacmat::error::Error| e.to_string())
}

fn regime(s: &str) -> Result<HoleRegime, String> {
    s.parse().map_err(|e: kacmat::error::Error| e.to_string())
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SampleArgs {
    /// ginibre, haar, truncated, ua or additive.
    #[arg(long, value_parser = ensemble, default_value = "ua")]
    pub ensemble: EnsembleKind,
    #[arg(long)]
    pub n: usize,
    /// Corner entry of `A`; overrides `--mu`.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub a: Option<Complex64>,
    /// `inf` or `re+imi`.
    #[arg(long, value_parser = mu, allow_hyphen_values = true)]
    pub mu: Option<Mu>,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub exec: ExecArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct KacRootsArgs {
    #[arg(long, default_value_t = 400)]
    pub degree: usize,
    #[arg(long, value_parser = mu, allow_hyphen_values = true)]
    pub mu: Mu,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Root-finder stopping tolerance on the normalised backward error.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Keep the origin root that an infinite `mu` forces.
    #[arg(long)]
    pub keep_origin: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub exec: ExecArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// `U A`; the truncated unitary when `a = 0`.
    Ua,
    /// Roots of the shifted random series, forced origin root removed.
    Kac,
}

/// Where the point sets come from, and the parameters the oracle needs.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SourceArgs {
    #[arg(long, value_enum, default_value_t = SourceKind::Kac)]
    pub source: SourceKind,
    /// Matrix size for `--source ua`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Series degree for `--source kac`.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub a: Option<Complex64>,
    #[arg(long, value_parser = mu, allow_hyphen_values = true)]
    pub mu: Option<Mu>,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read point sets from a `sample,re,im` file instead of sampling.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CriterionArgs {
    #[arg(long, default_value_t = 3.0)]
    pub z_limit: f64,
    /// Family-wise significance of the chi-squared test.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Inner edge of compared bins; 0.05 when the density vanishes at the origin.
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub r_max: f64,
    #[arg(long, default_value_t = 50.0)]
    pub min_expected: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub exec: ExecArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Rho2Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub w: Complex64,
    /// Window radius.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Rotated copies of the window pair per sample.
    #[arg(long, default_value_t = 90)]
    pub rotations: usize,
    #[arg(long, default_value_t = 3.0)]
    pub z_limit: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub exec: ExecArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct HoleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<f64>,
    /// Wilson interval confidence.
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// exact, small-r or near-1; exact for infinite `mu`, small-r otherwise.
    #[arg(long, value_parser = regime)]
    pub regime: Option<HoleRegime>,
    #[command(flatten)]
    #[serde(skip)]
    pub exec: ExecArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleForm {
    /// Limiting density at radii `--r`.
    DensityLimit,
    /// Finite-size density of `U A` (`--n`, `--a` or `--mu`) at radii `--r`.
    DensityFiniteN,
    /// One-point function by Kac–Rice at radii `--r`.
    Rho1Kacrice,
    /// Hole probability at radii `--r`.
    Hole,
    /// Two-point function at `--z`, `--w`.
    Rho2,
    /// Two-point function, factorised form.
    Rho2Direct,
    /// Two-point function by Kac–Rice.
    Rho2Kacrice,
    /// k-point function at `--points`.
    Rhok,
    /// `det K` at `--points`.
    Determinantal,
    /// Truncated k-point function at `--points`.
    Truncated,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub form: OracleForm,
    #[arg(long, value_parser = mu, allow_hyphen_values = true, default_value = "inf")]
    pub mu: Mu,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub a: Option<Complex64>,
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// `start:stop:count`, appended to `--r`.
    #[arg(long)]
    pub r_grid: Option<String>,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: Option<Complex64>,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub w: Option<Complex64>,
    /// Points `re+imi`, comma separated.
    #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Vec<Complex64>,
    #[arg(long, value_parser = regime)]
    pub regime: Option<HoleRegime>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SumruleArgs {
    #[arg(long, value_parser = mu, allow_hyphen_values = true, default_value = "inf")]
    pub mu: Mu,
    /// One or two points `re+imi`, comma separated.
    #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub points: Vec<Complex64>,
    /// The disk is cut at radius `1 - delta`.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, default_value_t = 96)]
    pub radial_nodes: usize,
    #[arg(long, default_value_t = 128)]
    pub angular_nodes: usize,
    /// Asserted bound on `|defect|` in the determinantal case.
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    /// A JSON report written by `density`, `rho2` or `hole`.
    #[arg(long)]
    pub report: PathBuf,
    /// The `sample,re,im` file to recompute it from.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub exec: ExecArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
