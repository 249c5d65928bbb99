use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "minsurf", version, about = "Riemann's periodic minimal surfaces: meshes, checks and KdV measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Sample the fundamental piece, extend it by reflections and write meshes.
    Gen(GenArgs),
    /// Run the verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Print hierarchy polynomials and measure the flows of the Gauss-map potential.
    Kdv(KdvArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    /// Curve parameter of M_σ.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Parameter of the classical example R_λ; σ is derived from it.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Seed for randomized sample points.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Where to write the JSON report (stdout when absent, except for gen).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Radius of the inner end circle in the unit half disc.
    #[arg(long, default_value_t = 0.1)]
    pub e: f64,
    /// Grid size as NRxNT.
    #[arg(long, default_value = "40x60")]
    pub grid: String,
    /// Translated copies added to the reflected piece.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Obj,
    Ply,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output directory.
    #[arg(short = 'o', long = "out", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Obj)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Override a check threshold, e.g. `--tol shiffman=1e-12`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct KdvArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Print P_0 .. P_N.
    #[arg(long = "print-p", value_name = "N")]
    pub print_p: Option<usize>,
    /// Fit flow_n against the lower flows.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of random points on the curve.
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
}
