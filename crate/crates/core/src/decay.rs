//! Oversampling-rate decay benchmark.
//!
//! Runs a quantizer against one bandlimited signal at a ladder of rates,
//! measures the interior low-pass error at each rate, and fits the log-log
//! slope. An order-r quantizer should come out near `-r`.

use crate::diffusion::{run_scheme, run_sigma_delta_1d, ScanOrder};
use crate::reconstruct::{quantization_error_1d, quantization_error_2d, LowPassKernel};
use crate::scheme::{FeedbackFilter, SchemeSpec};
use crate::signal::{BandlimitedSignal1d, BandlimitedSignal2d};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least 4 oversampling rates, got {0}")]
    TooFewLambdas(usize),
    #[error("oversampling rates must be strictly increasing")]
    LambdasNotIncreasing,
    #[error("oversampling rate {0} must exceed 1")]
    LambdaTooSmall(f64),
    #[error("non-finite error at oversampling rate {lambda}")]
    NonFinite { lambda: f64 },
}

/// Measured errors per rate and the fitted log-log slope.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
}

impl DecayReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("lambda,error\n");
        for (l, e) in self.lambdas.iter().zip(&self.errors) {
            out.push_str(&format!("{l},{e}\n"));
        }
        out
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// The kernel actually applied at rate `lambda`. Sharp cutoffs are already
/// expressed in physical frequency; a gaussian given in samples is widened
/// by `lambda` so its physical width stays fixed across the sweep.
pub fn kernel_at_rate(kernel: &LowPassKernel, lambda: f64) -> LowPassKernel {
    match *kernel {
        LowPassKernel::Ideal { cutoff } => LowPassKernel::Ideal { cutoff },
        LowPassKernel::Gaussian { std } => LowPassKernel::Gaussian { std: std * lambda },
    }
}

fn validate_lambdas(lambdas: &[f64]) -> Result<(), EvalError> {
    if lambdas.len() < 4 {
        return Err(EvalError::TooFewLambdas(lambdas.len()));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvalError::LambdasNotIncreasing);
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| l <= 1.0) {
        return Err(EvalError::LambdaTooSmall(bad));
    }
    Ok(())
}

fn finish(lambdas: &[f64], errors: Vec<f64>) -> Result<DecayReport, EvalError> {
    for (l, e) in lambdas.iter().zip(&errors) {
        if !e.is_finite() {
            return Err(EvalError::NonFinite { lambda: *l });
        }
    }
    let fitted_slope = fit_loglog_slope(lambdas, &errors);
    Ok(DecayReport {
        lambdas: lambdas.to_vec(),
        errors,
        fitted_slope,
    })
}

/// Round a requested rate onto the exact sampling lattice: the sweep uses
/// the rate `n / period` whose `n` samples cover one period exactly.
fn lattice_rate(lambda: f64, period: f64) -> (usize, f64) {
    let n = (lambda * period).round().max(period + 1.0) as usize;
    (n, n as f64 / period)
}

/// Sweep a 1D sigma-delta quantizer over `lambdas`. Rates snap to the
/// sampling lattice; the report carries the rates actually used.
pub fn decay_experiment_1d(
    signal: &BandlimitedSignal1d,
    filter: &FeedbackFilter,
    lambdas: &[f64],
    kernel: &LowPassKernel,
    margin: f64,
) -> Result<DecayReport, EvalError> {
    validate_lambdas(lambdas)?;
    let mut used = Vec::with_capacity(lambdas.len());
    let errors = lambdas
        .iter()
        .map(|&lambda| {
            let (n, lambda) = lattice_rate(lambda, signal.period());
            used.push(lambda);
            let samples = signal.sample(lambda, n);
            let run = run_sigma_delta_1d(&samples, filter);
            quantization_error_1d(signal, &run.q, lambda, &kernel_at_rate(kernel, lambda), margin)
        })
        .collect();
    finish(&used, errors)
}

/// Sweep a 2D error-diffusion scheme over `lambdas`.
pub fn decay_experiment_2d(
    signal: &BandlimitedSignal2d,
    scheme: &SchemeSpec,
    scan: ScanOrder,
    lambdas: &[f64],
    kernel: &LowPassKernel,
    margin: f64,
) -> Result<DecayReport, EvalError> {
    validate_lambdas(lambdas)?;
    let mut used = Vec::with_capacity(lambdas.len());
    let errors = lambdas
        .iter()
        .map(|&lambda| {
            let (n, lambda) = lattice_rate(lambda, signal.period());
            used.push(lambda);
            let samples = signal.sample_image(lambda, n);
            let result = run_scheme(&samples, scheme, scan);
            quantization_error_2d(
                signal,
                &result.q,
                lambda,
                &kernel_at_rate(kernel, lambda),
                margin,
            )
        })
        .collect();
    finish(&used, errors)
}
