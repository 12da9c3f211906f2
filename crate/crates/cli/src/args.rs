use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discspec_core::BoundaryCondition;

#[derive(Debug, Parser)]
#[command(name = "discspec", version, about = "Spectra, nodal sets and heat flow on radially weighted discs")]
pub struct Cli {
    /// Worker threads for per-mode solves (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of the surface with mode labels and multiplicities.
    Spectrum(SpectrumArgs),
    /// One radial eigenfunction sampled on a uniform r-grid.
    Eigenfunction(PairArgs),
    /// Nodal circles and domain count of one eigenfunction.
    Nodal(PairArgs),
    /// Extrema of one radial eigenfunction.
    Hotspot(PairArgs),
    /// δ at which the m-th radial eigenvalue meets the first angular one.
    Crossing(CrossingArgs),
    /// Heat flow from the generic datum 1 + e^{-r} + 0.3 r cos θ.
    Heat(HeatArgs),
    /// Check the closed-form eigenvalue bounds of the peaked family.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl From<Bc> for BoundaryCondition {
    fn from(bc: Bc) -> Self {
        match bc {
            Bc::Dirichlet => BoundaryCondition::Dirichlet,
            Bc::Neumann => BoundaryCondition::Neumann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `--metric` value before any file is read.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricArg {
    Peaked(f64),
    Flat,
    Custom(PathBuf),
}

pub fn parse_metric(s: &str) -> Result<MetricArg, String> {
    if s == "flat" {
        return Ok(MetricArg::Flat);
    }
    if let Some(path) = s.strip_prefix("custom:") {
        if path.is_empty() {
            return Err("custom metric needs a CSV path".into());
        }
        return Ok(MetricArg::Custom(PathBuf::from(path)));
    }
    let delta = s
        .strip_prefix("freitas:")
        .or_else(|| s.strip_prefix("peaked:"))
        .ok_or_else(|| format!("unknown metric `{s}` (expected freitas:<delta>, flat or custom:<csv>)"))?;
    let value: f64 = delta.parse().map_err(|_| format!("invalid delta `{delta}`"))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(format!("delta must be positive and finite, got {delta}"));
    }
    Ok(MetricArg::Peaked(value))
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("range `{s}` must be lo:hi"))?;
    let lo: f64 = lo.parse().map_err(|_| format!("invalid range bound `{lo}`"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("invalid range bound `{hi}`"))?;
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (written atomically); standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct Problem {
    /// freitas:<delta> (alias peaked:<delta>), flat, or custom:<csv with columns r,p>.
    #[arg(long, value_parser = parse_metric)]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value = "dirichlet")]
    pub bc: Bc,
    /// Grid intervals in the area coordinate.
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// Number of eigenvalues (with multiplicity). Without it, modes 0..=K
    /// with J eigenvalues each are listed.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub modes: u32,
    #[arg(long, default_value_t = 6)]
    pub per_mode: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub problem: Problem,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// 1-based index within the mode.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Radial samples for eigenfunction output.
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CrossingArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "dirichlet")]
    pub bc: Bc,
    /// Search interval for δ.
    #[arg(long, value_parser = parse_range, default_value = "1e-10:1")]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Relative tolerance on δ.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Spectral,
    Cn,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[arg(long, value_parser = parse_metric)]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value = "neumann")]
    pub bc: Bc,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "spectral")]
    pub method: Method,
    #[arg(long, default_value_t = 4.0)]
    pub t_end: f64,
    /// Number of recorded times, uniformly spaced on [0, t_end].
    #[arg(long, default_value_t = 41)]
    pub outputs: usize,
    /// Crank–Nicolson time step.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Spectral cutoff: highest angular mode.
    #[arg(long, default_value_t = 8)]
    pub modes: u32,
    /// Spectral cutoff: eigenpairs per mode.
    #[arg(long, default_value_t = 12)]
    pub per_mode: usize,
    #[arg(long, default_value_t = 201)]
    pub grid_r: usize,
    #[arg(long, default_value_t = 64)]
    pub grid_theta: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_metric)]
    pub metric: MetricArg,
    /// Boundary condition; both when absent.
    #[arg(long, value_enum)]
    pub bc: Option<Bc>,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub jmax: usize,
    #[arg(long, default_value_t = 5)]
    pub kmax: u32,
    #[command(flatten)]
    pub output: Output,
}
