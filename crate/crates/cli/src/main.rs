use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod reproduce;
mod svg;

use fractal_spectra_core::energy::NormalizationConvention;
use fractal_spectra_core::harmonic_structure::Variant;
use fractal_spectra_core::oracle::Boundary;

/// Name of the environment variable overriding the level cap.
pub const LEVEL_CAP_VAR: &str = "FRACTAL_SPECTRA_LEVEL_CAP";

#[derive(Debug, Parser)]
#[command(name = "fractal-spectra", version, about = "Energy, random walks and spectra on the Minkowski curve")]
struct Cli {
    /// Tolerance for validation checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Walk, Hausdorff and spectral dimensions with the Einstein residual.
    Dims,
    /// Dirichlet spectrum by decimation.
    Spectrum(SpectrumArgs),
    /// Decimation polynomial, or a comparison of the decimated spectrum with the oracle.
    Decimate(DecimateArgs),
    /// Dense tridiagonal eigensolver on the path Laplacian.
    Oracle(OracleArgs),
    /// Harmonic extension of boundary values.
    Harmonic(HarmonicArgs),
    /// Energy constants at a level.
    Energy(EnergyArgs),
    /// Crossing times, optionally with a Monte-Carlo estimate.
    Walk(WalkArgs),
    /// Strong harmonic structure identity and the recovered polynomial.
    Structure(StructureArgs),
    /// Write an eigenfunction as an SVG polyline.
    Eigenfunction(EigenfunctionArgs),
    /// Vertices of a level graph as CSV.
    Graph(GraphArgs),
    /// Run every reproduction check and print PASS/FAIL per item.
    ReproduceAll(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Norm {
    Raw,
    Conserved,
    Geometric,
}

impl From<Norm> for NormalizationConvention {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Raw => Self::Raw,
            Norm::Conserved => Self::Conserved,
            Norm::Geometric => Self::PaperGeometric,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Neumann,
}

impl From<Bc> for Boundary {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Dirichlet => Self::Dirichlet,
            Bc::Neumann => Self::Neumann,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Curve,
    Island,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Curve => Self::Curve,
            VariantArg::Island => Self::Island,
        }
    }
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Report 64^m·λ instead of λ.
    #[arg(long)]
    renormalized: bool,
    /// Compare with the closed-form path spectrum.
    #[arg(long)]
    check_oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecimateArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long)]
    check_oracle: bool,
    /// Shift the linear coefficient of R by this amount.
    #[arg(long, hide = true)]
    perturb: Option<f64>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, value_enum, default_value_t = Bc::Dirichlet)]
    bc: Bc,
    /// Append eigenvector entries to each row.
    #[arg(long)]
    vectors: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HarmonicArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, value_enum, default_value_t = Norm::Conserved)]
    norm: Norm,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnergyArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, value_enum, default_value_t = Norm::Conserved)]
    norm: Norm,
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[arg(long)]
    simulate: bool,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    level: u32,
}

#[derive(Debug, Args)]
struct StructureArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::Curve)]
    variant: VariantArg,
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Debug, Args)]
struct EigenfunctionArgs {
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// 1-based position in the ascending spectrum.
    #[arg(long)]
    index: usize,
    #[arg(long)]
    svg: PathBuf,
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// Shift the linear coefficient of R by this amount.
    #[arg(long, hide = true)]
    perturb: Option<f64>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A check exceeded its tolerance.
    Validation(String),
    /// Bad arguments or out-of-range input.
    Usage(String),
    Io(io::Error),
}

impl From<fractal_spectra_core::Error> for Failure {
    fn from(e: fractal_spectra_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

pub type Outcome = Result<(), Failure>;

/// Level cap from the environment, or `default`.
pub fn level_cap(default: u32) -> Result<u32, Failure> {
    match std::env::var(LEVEL_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{LEVEL_CAP_VAR} must be an integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(default),
        Err(e) => Err(Failure::Usage(format!("{LEVEL_CAP_VAR}: {e}"))),
    }
}

fn run(cli: Cli) -> Outcome {
    let tol = cli.tolerance;
    match cli.command {
        Command::Dims => commands::dims(),
        Command::Spectrum(a) => commands::spectrum(a.m, a.renormalized, a.check_oracle, a.format, a.csv, tol),
        Command::Decimate(a) => commands::decimate(a.m, a.check_oracle, a.perturb, tol),
        Command::Oracle(a) => commands::oracle(a.m, a.bc.into(), a.vectors, a.csv),
        Command::Harmonic(a) => commands::harmonic(a.a, a.b, a.m, a.norm.into(), a.csv),
        Command::Energy(a) => commands::energy(a.m, a.norm.into()),
        Command::Walk(a) => commands::walk(a.simulate, a.level, a.trials, a.seed),
        Command::Structure(a) => commands::structure(a.variant.into(), a.samples, tol),
        Command::Eigenfunction(a) => commands::eigenfunction(a.m, a.index, &a.svg),
        Command::Graph(a) => commands::graph(a.m, a.csv),
        Command::ReproduceAll(a) => reproduce::run(a.perturb),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(cli);
    let _ = io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
