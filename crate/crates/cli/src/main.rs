//! `ht` — halftoning command line.
//!
//! Subcommands: `halftone` (error diffusion), `dots` (attraction-repulsion
//! stippling), `metrics` (quality measures), `expand` (extended weight
//! matrices), `decay` (oversampling-rate benchmark).
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
//! 3 benchmark threshold failure.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ht", version, about = "Halftoning toolkit", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Halftone a PGM image with an error-diffusion scheme.
    Halftone(HalftoneArgs),
    /// Place continuous stipple dots by attraction-repulsion relaxation.
    Dots(DotsArgs),
    /// Compare an original image against its halftone.
    Metrics(MetricsArgs),
    /// Print the extended coefficient grid of a scheme as exact fractions.
    Expand(ExpandArgs),
    /// Measure how the reconstruction error decays with oversampling.
    Decay(DecayArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ScanArg {
    Raster,
    Serpentine,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum KernelArg {
    Ideal,
    Gaussian,
}

#[derive(Args)]
struct HalftoneArgs {
    /// Input PGM (P2 or P5).
    input: PathBuf,
    /// Output PGM (always P5, maxval 255).
    output: PathBuf,
    /// Built-in scheme name or path to a scheme JSON file.
    #[arg(long, default_value = "fs1")]
    scheme: String,
    #[arg(long, value_enum, default_value = "raster")]
    scan: ScanArg,
    /// Amplitude rescale margin applied before schemes of order >= 2.
    #[arg(long, conflicts_with = "no_rescale")]
    rescale: Option<f64>,
    /// Feed the image to the quantizer at full amplitude.
    #[arg(long)]
    no_rescale: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum DotsMethod {
    /// Subgradient descent on the attraction-repulsion energy.
    Descent,
    /// The electrostatic force iteration.
    Force,
    /// Force iteration followed by a short descent polish.
    Hybrid,
}

#[derive(Args)]
struct DotsArgs {
    /// Input PGM.
    input: PathBuf,
    /// Output CSV of dot positions (header `x,y`).
    #[arg(long)]
    out: PathBuf,
    /// Also write the snapped binary image next to the CSV (.pgm).
    #[arg(long)]
    snap: bool,
    #[arg(long, value_enum, default_value = "descent")]
    method: DotsMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step size of the relaxation.
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    /// Iteration budget. Each iteration costs O(dots x pixels + dots^2);
    /// dark megapixel images take a while.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Stop when the largest dot displacement falls below this.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

#[derive(Args)]
struct MetricsArgs {
    /// Original grayscale PGM.
    original: PathBuf,
    /// Halftoned binary PGM of the same dimensions.
    halftone: PathBuf,
    /// Comma-separated subset of quadrature,fourier,ball,lowpass.
    #[arg(long, default_value = "quadrature,fourier,ball,lowpass")]
    metrics: String,
    /// Gaussian scale of the quadrature kernel, in pixels.
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Frequency bandwidth of the torus discrepancy kernel.
    #[arg(long, default_value_t = 8)]
    bandwidth: i64,
    /// Largest ball radius of the ball discrepancy (default: min(w,h)/4).
    #[arg(long)]
    radius_max: Option<f64>,
    /// Number of radius steps of the ball discrepancy.
    #[arg(long, default_value_t = 16)]
    resolution: usize,
    /// Low-pass kernel of the reconstruction-error metric.
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,
    /// Gaussian width in pixels (gaussian kernel).
    #[arg(long, default_value_t = 2.0)]
    std: f64,
    /// Frequency cutoff in cycles per pixel (ideal kernel).
    #[arg(long, default_value_t = 0.25)]
    cutoff: f64,
    /// Boundary fraction trimmed from the low-pass comparison.
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
}

#[derive(Args)]
struct ExpandArgs {
    /// Built-in scheme name or path to a scheme JSON file.
    scheme: String,
}

#[derive(Args)]
struct DecayArgs {
    /// Signal and quantizer dimensionality.
    #[arg(long, default_value_t = 1)]
    dims: u8,
    /// 1D feedback filter: h1, h2, or h3.
    #[arg(long, default_value = "h1")]
    filter: String,
    /// 2D scheme (used with --dims 2).
    #[arg(long, default_value = "fs1")]
    scheme: String,
    #[arg(long, value_enum, default_value = "raster")]
    scan: ScanArg,
    /// Comma-separated oversampling rates (default 4,8,16,32,64 for 1D,
    /// 2,4,8,16 for 2D).
    #[arg(long)]
    lambdas: Option<String>,
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,
    /// Gaussian width in signal units, held fixed across rates.
    #[arg(long, default_value_t = 0.25)]
    std: f64,
    /// Ideal-kernel cutoff in cycles per signal unit.
    #[arg(long, default_value_t = 0.5)]
    cutoff: f64,
    /// Interior fraction trimmed per side before taking the sup.
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    /// Signal bandwidth index (default 8 for 1D, 32 for 2D).
    #[arg(long)]
    k_max: Option<i64>,
    /// Signal amplitude bound.
    #[arg(long, default_value_t = 0.9)]
    amplitude: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the report as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fail (exit 3) when the fitted slope is below this.
    #[arg(long, allow_negative_numbers = true)]
    slope_min: Option<f64>,
    /// Fail (exit 3) when the fitted slope is above this
    /// (default: -0.75 times the quantizer order).
    #[arg(long, allow_negative_numbers = true)]
    slope_max: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Halftone(args) => commands::halftone(args),
        Command::Dots(args) => commands::dots(args),
        Command::Metrics(args) => commands::metrics(args),
        Command::Expand(args) => commands::expand(args),
        Command::Decay(args) => commands::decay(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ht: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
