//! Subcommand implementations and their exit-code mapping.

use crate::{
    DecayArgs, DotsArgs, DotsMethod, ExpandArgs, HalftoneArgs, KernelArg, MetricsArgs, ScanArg,
};
use halftone_core::attraction::{
    dot_count, energy, equilibration_lambda, evolve, snap_to_grid, subgradient_descent,
    AttractionError, DotConfiguration, EvolutionParams, StopReason, WeightField,
};
use halftone_core::decay::{decay_experiment_1d, decay_experiment_2d, EvalError};
use halftone_core::diffusion::{rescale, run_scheme, ScanOrder};
use halftone_core::image::BinaryImage;
use halftone_core::pgm::{load_pgm, save_binary_pgm, PgmError};
use halftone_core::reconstruct::{lowpass_sup_error, LowPassKernel};
use halftone_core::rkhs::{
    ball_discrepancy, fourier_discrepancy, quadrature_error, DiscreteMeasure, FourierKernel,
    RadialKernel,
};
use halftone_core::scheme::{builtin, builtin_names, expand_scheme, FeedbackFilter, SchemeSpec};
use halftone_core::signal::{BandlimitedSignal1d, BandlimitedSignal2d};
use halftone_core::util::fmt_sig;
use halftone_core::Point;
use std::path::Path;

pub struct CmdError {
    pub code: u8,
    pub message: String,
}

fn io_err(message: impl Into<String>) -> CmdError {
    CmdError {
        code: 1,
        message: message.into(),
    }
}

fn usage_err(message: impl Into<String>) -> CmdError {
    CmdError {
        code: 2,
        message: message.into(),
    }
}

fn threshold_err(message: impl Into<String>) -> CmdError {
    CmdError {
        code: 3,
        message: message.into(),
    }
}

impl From<PgmError> for CmdError {
    fn from(err: PgmError) -> Self {
        match err {
            PgmError::Io(e) => io_err(format!("i/o error: {e}")),
            other => usage_err(other.to_string()),
        }
    }
}

impl From<AttractionError> for CmdError {
    fn from(err: AttractionError) -> Self {
        match err {
            AttractionError::Io(e) => io_err(format!("i/o error: {e}")),
            other => usage_err(other.to_string()),
        }
    }
}

impl From<EvalError> for CmdError {
    fn from(err: EvalError) -> Self {
        usage_err(err.to_string())
    }
}

impl From<ScanArg> for ScanOrder {
    fn from(scan: ScanArg) -> Self {
        match scan {
            ScanArg::Raster => ScanOrder::Raster,
            ScanArg::Serpentine => ScanOrder::Serpentine,
        }
    }
}

/// A scheme argument is first tried as a built-in name, then as a path to
/// a scheme JSON document.
fn resolve_scheme(arg: &str) -> Result<SchemeSpec, CmdError> {
    if let Some(scheme) = builtin(arg) {
        return Ok(scheme);
    }
    if Path::new(arg).exists() {
        return SchemeSpec::from_json_file(arg)
            .map_err(|e| usage_err(format!("scheme file {arg:?}: {e}")));
    }
    Err(usage_err(format!(
        "unknown scheme {arg:?}; built-in schemes: {}",
        builtin_names().join(", ")
    )))
}

pub fn halftone(args: HalftoneArgs) -> Result<(), CmdError> {
    let scheme = resolve_scheme(&args.scheme)?;
    let image = load_pgm(&args.input)?;
    let mut signed = image.to_signed();
    let margin = args.rescale.unwrap_or(0.03);
    if !(0.0..1.0).contains(&margin) {
        return Err(usage_err(format!("rescale margin {margin} outside [0, 1)")));
    }
    let apply_rescale =
        !args.no_rescale && margin > 0.0 && (scheme.order() >= 2 || args.rescale.is_some());
    if apply_rescale {
        signed = rescale(&signed, margin);
    }
    let result = run_scheme(&signed, &scheme, args.scan.into());
    save_binary_pgm(&result.q, &args.output)?;
    println!(
        "{{\"scheme\":\"{}\",\"scan\":\"{}\",\"v_max_abs\":{}}}",
        result.scheme,
        result.scan,
        fmt_sig(result.v_max_abs, 12)
    );
    Ok(())
}

fn stop_label(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "converged",
        StopReason::MaxIters => "max-iters",
        StopReason::Stagnated => "stagnated",
    }
}

pub fn dots(args: DotsArgs) -> Result<(), CmdError> {
    let image = load_pgm(&args.input)?;
    let m = dot_count(&image)?;
    let weights = WeightField::from_image(&image);
    let lambda = equilibration_lambda(&weights, m);
    let init = DotConfiguration::random(m, image.width(), image.height(), args.seed)?;
    let energy_initial = energy(&init, &weights, lambda);
    let params = EvolutionParams {
        tau: args.tau,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
        max_step: 0.5,
    };
    let run = match args.method {
        DotsMethod::Descent => subgradient_descent(&init, &weights, lambda, &params)?,
        DotsMethod::Force => evolve(&init, &weights, &params)?,
        DotsMethod::Hybrid => {
            let organized = evolve(&init, &weights, &params)?;
            let polish = EvolutionParams { tau: 0.5, ..params };
            let mut polished = subgradient_descent(&organized.config, &weights, lambda, &polish)?;
            polished.iterations += organized.iterations;
            polished
        }
    };
    let energy_final = energy(&run.config, &weights, lambda);
    run.config.write_csv(&args.out)?;
    if args.snap {
        let snapped = snap_to_grid(&run.config, image.width(), image.height())?;
        save_binary_pgm(&snapped, args.out.with_extension("pgm"))?;
    }
    println!(
        "{{\"m\":{m},\"lambda\":{},\"iterations\":{},\"energy_initial\":{},\"energy_final\":{},\"stop\":\"{}\"}}",
        fmt_sig(lambda, 12),
        run.iterations,
        fmt_sig(energy_initial, 12),
        fmt_sig(energy_final, 12),
        stop_label(run.stop)
    );
    Ok(())
}

pub fn metrics(args: MetricsArgs) -> Result<(), CmdError> {
    let original = load_pgm(&args.original)?;
    let halftone_gray = load_pgm(&args.halftone)?;
    if original.width() != halftone_gray.width() || original.height() != halftone_gray.height() {
        return Err(usage_err(format!(
            "dimension mismatch: original {}x{}, halftone {}x{}",
            original.width(),
            original.height(),
            halftone_gray.width(),
            halftone_gray.height()
        )));
    }
    let halftone = BinaryImage::try_from_gray(&halftone_gray)
        .map_err(|e| usage_err(format!("halftone image is not binary: {e}")))?;

    let selected: Vec<&str> = args.metrics.split(',').map(str::trim).collect();
    for name in &selected {
        if !["quadrature", "fourier", "ball", "lowpass"].contains(name) {
            return Err(usage_err(format!(
                "unknown metric {name:?}; available: quadrature, fourier, ball, lowpass"
            )));
        }
    }

    let (width, height) = (original.width(), original.height());
    let dots: Vec<Point> = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .filter(|&(r, c)| halftone.get(r, c) == -1)
        .map(|(r, c)| Point::new(c as f64 + 1.0, r as f64 + 1.0))
        .collect();
    let m = dots.len();
    let config = if m > 0 {
        Some(DotConfiguration::new(dots).expect("nonempty"))
    } else {
        None
    };
    let measure = DiscreteMeasure::from_gray(&original);
    let weight_sum = measure.total();

    let mut fields: Vec<(String, String)> = Vec::new();
    for name in &selected {
        match *name {
            "quadrature" => {
                let Some(config) = &config else {
                    return Err(usage_err(
                        "halftone has no black pixels; dot metrics are undefined (use --metrics lowpass)",
                    ));
                };
                let kernel = RadialKernel::Gaussian { sigma: args.sigma };
                let lambda = weight_sum / m as f64;
                let value = quadrature_error(config, &measure, &kernel, lambda)
                    .map_err(|e| usage_err(e.to_string()))?;
                fields.push(("quadrature_error".into(), fmt_sig(value, 12)));
            }
            "fourier" => {
                let Some(config) = &config else {
                    return Err(usage_err(
                        "halftone has no black pixels; dot metrics are undefined (use --metrics lowpass)",
                    ));
                };
                let kernel = FourierKernel::default_profile(args.bandwidth);
                // mass matching on the unit torus, where each pixel cell
                // carries area 1/(width*height)
                let lambda = weight_sum / (m as f64 * width as f64 * height as f64);
                let value = fourier_discrepancy(config, &original, &kernel, lambda);
                fields.push(("fourier_discrepancy".into(), fmt_sig(value, 12)));
            }
            "ball" => {
                let Some(config) = &config else {
                    return Err(usage_err(
                        "halftone has no black pixels; dot metrics are undefined (use --metrics lowpass)",
                    ));
                };
                let radius_max = args
                    .radius_max
                    .unwrap_or_else(|| (width.min(height) as f64 / 4.0).max(1.0));
                let lambda = weight_sum / m as f64;
                let value =
                    ball_discrepancy(config, &original, radius_max, args.resolution, lambda);
                fields.push(("ball_discrepancy".into(), fmt_sig(value, 12)));
            }
            "lowpass" => {
                let kernel = match args.kernel {
                    KernelArg::Gaussian => LowPassKernel::Gaussian { std: args.std },
                    KernelArg::Ideal => LowPassKernel::Ideal {
                        cutoff: args.cutoff,
                    },
                };
                let value = lowpass_sup_error(
                    original.to_signed().values(),
                    halftone.to_signed().values(),
                    width,
                    height,
                    &kernel,
                    args.margin,
                );
                fields.push(("lowpass_error".into(), fmt_sig(value, 12)));
            }
            _ => unreachable!(),
        }
    }

    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("\"{k}\":{v}"))
        .collect();
    println!("{{{}}}", body.join(","));
    Ok(())
}

pub fn expand(args: ExpandArgs) -> Result<(), CmdError> {
    let scheme = resolve_scheme(&args.scheme)?;
    let matrix = expand_scheme(&scheme);
    let (max_di, min_dj, max_dj) = matrix.bounds();
    println!(
        "scheme {} (order {}), rows di=0..{max_di}, cols dj={min_dj}..{max_dj}, origin [..]",
        scheme.name(),
        scheme.order()
    );
    print!("{matrix}");
    Ok(())
}

fn parse_lambdas(text: &str) -> Result<Vec<f64>, CmdError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage_err(format!("bad oversampling rate {s:?}")))
        })
        .collect()
}

pub fn decay(args: DecayArgs) -> Result<(), CmdError> {
    let kernel = match args.kernel {
        KernelArg::Gaussian => LowPassKernel::Gaussian { std: args.std },
        KernelArg::Ideal => LowPassKernel::Ideal {
            cutoff: args.cutoff,
        },
    };
    let (report, order) = match args.dims {
        1 => {
            let filter = match args.filter.as_str() {
                "h1" => FeedbackFilter::first_order(),
                "h2" => FeedbackFilter::h2(),
                "h3" => FeedbackFilter::h3(),
                other => {
                    return Err(usage_err(format!(
                        "unknown filter {other:?}; available: h1, h2, h3"
                    )))
                }
            };
            let order = if args.filter == "h1" { 1 } else { 2 };
            let lambdas = match &args.lambdas {
                Some(text) => parse_lambdas(text)?,
                None => vec![4.0, 8.0, 16.0, 32.0, 64.0],
            };
            let signal =
                BandlimitedSignal1d::random(args.k_max.unwrap_or(8), args.amplitude, args.seed);
            (
                decay_experiment_1d(&signal, &filter, &lambdas, &kernel, args.margin)?,
                order,
            )
        }
        2 => {
            let scheme = resolve_scheme(&args.scheme)?;
            let lambdas = match &args.lambdas {
                Some(text) => parse_lambdas(text)?,
                None => vec![2.0, 4.0, 8.0, 16.0],
            };
            let signal =
                BandlimitedSignal2d::random(args.k_max.unwrap_or(32), args.amplitude, args.seed);
            let order = scheme.order();
            (
                decay_experiment_2d(
                    &signal,
                    &scheme,
                    args.scan.into(),
                    &lambdas,
                    &kernel,
                    args.margin,
                )?,
                order,
            )
        }
        other => return Err(usage_err(format!("dims must be 1 or 2, got {other}"))),
    };

    if let Some(path) = &args.out {
        std::fs::write(path, report.to_json_string()).map_err(|e| io_err(e.to_string()))?;
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_csv_string()).map_err(|e| io_err(e.to_string()))?;
    }
    println!("{}", report.to_json_string());

    // Gate on the decay direction the theory guarantees: an order-r
    // quantizer must reach at least three quarters of the -r slope.
    let slope_max = args.slope_max.unwrap_or(-0.75 * order as f64);
    let slope = report.fitted_slope;
    if slope > slope_max {
        return Err(threshold_err(format!(
            "fitted slope {slope} is above the ceiling {slope_max}"
        )));
    }
    if let Some(slope_min) = args.slope_min {
        if slope < slope_min {
            return Err(threshold_err(format!(
                "fitted slope {slope} is below the floor {slope_min}"
            )));
        }
    }
    Ok(())
}
