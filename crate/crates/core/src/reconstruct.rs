//! Low-pass reconstruction of sampled signals and the sup-norm error
//! measurements built on it.
//!
//! Reconstruction evaluates `(1/lambda^d) sum_n y_n Phi(x - n/lambda)` on a
//! uniform refinement of the sample grid. The ideal kernel realizes a sharp
//! frequency cutoff through zero-padded discrete Fourier truncation; the
//! gaussian kernel is summed directly with taps truncated at 1e-12 relative
//! magnitude. Quantization error is the interior sup-norm difference
//! between the reconstruction of the true samples and of the quantized
//! ones — the part of the halftoning error a low-pass observer sees.

use crate::image::BinaryImage;
use crate::signal::{BandlimitedSignal1d, BandlimitedSignal2d};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Evaluation-grid refinement used by the 1D error measurements.
pub const EVAL_OVERSAMPLE_1D: usize = 4;
/// Refinement for 2D; coarser because grids are quadratically larger.
pub const EVAL_OVERSAMPLE_2D: usize = 2;

/// Keep taps down to this fraction of the gaussian peak.
const GAUSSIAN_TAIL: f64 = 1e-12;

/// Low-pass reconstruction kernel.
///
/// `Ideal` keeps frequencies up to `cutoff` (in cycles per physical unit,
/// i.e. per sample at `lambda = 1`). `Gaussian` has its standard deviation
/// given in samples; callers that sweep the sampling rate and want a kernel
/// fixed in physical units scale `std` by `lambda` (see
/// [`crate::decay::kernel_at_rate`]).
#[derive(Clone, Copy, Debug)]
pub enum LowPassKernel {
    Ideal { cutoff: f64 },
    Gaussian { std: f64 },
}

/// Gaussian taps on the evaluation grid: `tab[t] = Phi(t/(s*lambda))/lambda`
/// for the density-normalized gaussian, nonzero reach included.
fn gaussian_taps(std_samples: f64, oversample: usize) -> Vec<f64> {
    assert!(std_samples > 0.0);
    let sigma_eval = std_samples * oversample as f64;
    let reach = (sigma_eval * (2.0 * GAUSSIAN_TAIL.ln().abs()).sqrt()).ceil() as i64;
    let norm = 1.0 / (std_samples * (2.0 * std::f64::consts::PI).sqrt());
    (-reach..=reach)
        .map(|t| norm * (-(t as f64 * t as f64) / (2.0 * sigma_eval * sigma_eval)).exp())
        .collect()
}

fn gaussian_pass(values: &[f64], taps: &[f64], oversample: usize) -> Vec<f64> {
    let n = values.len();
    let out_len = n * oversample;
    let reach = (taps.len() as i64 - 1) / 2;
    let s = oversample as i64;
    let mut out = Vec::with_capacity(out_len);
    for j in 0..out_len as i64 {
        let lo = (j - reach + s - 1).div_euclid(s).max(0);
        let hi = ((j + reach).div_euclid(s)).min(n as i64 - 1);
        let mut acc = 0.0;
        for idx in lo..=hi {
            let t = j - s * idx;
            acc += values[idx as usize] * taps[(t + reach) as usize];
        }
        out.push(acc);
    }
    out
}

/// Largest signed DFT bin magnitude kept by a sharp cutoff; the Nyquist
/// bin of even-length transforms is always dropped.
fn ideal_bin_cap(cutoff: f64, n: usize, lambda: f64) -> i64 {
    let physical = (cutoff * n as f64 / lambda + 1e-9).floor() as i64;
    physical.min(((n - 1) / 2) as i64)
}

fn fft_forward(data: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(data.len()).process(data);
}

fn fft_inverse(data: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(data.len()).process(data);
}

fn reconstruct_ideal_1d(values: &[f64], lambda: f64, cutoff: f64, oversample: usize) -> Vec<f64> {
    let n = values.len();
    let mut spectrum: Vec<Complex64> =
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut spectrum);
    let cap = ideal_bin_cap(cutoff, n, lambda);
    let out_len = n * oversample;
    let mut padded = vec![Complex64::new(0.0, 0.0); out_len];
    for k in -cap..=cap {
        let src = k.rem_euclid(n as i64) as usize;
        let dst = k.rem_euclid(out_len as i64) as usize;
        padded[dst] = spectrum[src];
    }
    fft_inverse(&mut padded);
    let scale = 1.0 / n as f64;
    padded.into_iter().map(|v| v.re * scale).collect()
}

/// Reconstruct a 1D sample sequence on an `oversample`-times finer grid.
pub fn reconstruct_1d(
    values: &[f64],
    lambda: f64,
    kernel: &LowPassKernel,
    oversample: usize,
) -> Vec<f64> {
    assert!(oversample >= 1);
    match *kernel {
        LowPassKernel::Ideal { cutoff } => {
            reconstruct_ideal_1d(values, lambda, cutoff, oversample)
        }
        LowPassKernel::Gaussian { std } => {
            gaussian_pass(values, &gaussian_taps(std, oversample), oversample)
        }
    }
}

fn transpose(values: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for r in 0..height {
        for c in 0..width {
            out[c * height + r] = values[r * width + c];
        }
    }
    out
}

fn reconstruct_gaussian_2d(
    values: &[f64],
    width: usize,
    height: usize,
    std: f64,
    oversample: usize,
) -> Vec<f64> {
    let taps = gaussian_taps(std, oversample);
    // pass along rows: height x width -> height x (s*width)
    let mid: Vec<f64> = values
        .par_chunks_exact(width)
        .flat_map_iter(|row| gaussian_pass(row, &taps, oversample))
        .collect();
    // pass along columns via transpose
    let mid_t = transpose(&mid, width * oversample, height);
    let out_t: Vec<f64> = mid_t
        .par_chunks_exact(height)
        .flat_map_iter(|col| gaussian_pass(col, &taps, oversample))
        .collect();
    transpose(&out_t, height * oversample, width * oversample)
}

fn reconstruct_ideal_2d(
    values: &[f64],
    width: usize,
    height: usize,
    lambda: f64,
    cutoff: f64,
    oversample: usize,
) -> Vec<f64> {
    let mut grid: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(width);
    for row in grid.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(height);
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for c in 0..width {
        for r in 0..height {
            column[r] = grid[r * width + c];
        }
        col_fft.process(&mut column);
        for r in 0..height {
            grid[r * width + c] = column[r];
        }
    }

    let cap_x = ideal_bin_cap(cutoff, width, lambda);
    let cap_y = ideal_bin_cap(cutoff, height, lambda);
    let (out_w, out_h) = (width * oversample, height * oversample);
    let mut padded = vec![Complex64::new(0.0, 0.0); out_w * out_h];
    for ky in -cap_y..=cap_y {
        let src_r = ky.rem_euclid(height as i64) as usize;
        let dst_r = ky.rem_euclid(out_h as i64) as usize;
        for kx in -cap_x..=cap_x {
            let src_c = kx.rem_euclid(width as i64) as usize;
            let dst_c = kx.rem_euclid(out_w as i64) as usize;
            padded[dst_r * out_w + dst_c] = grid[src_r * width + src_c];
        }
    }

    let row_ifft = planner.plan_fft_inverse(out_w);
    for row in padded.chunks_exact_mut(out_w) {
        row_ifft.process(row);
    }
    let col_ifft = planner.plan_fft_inverse(out_h);
    let mut out_col = vec![Complex64::new(0.0, 0.0); out_h];
    for c in 0..out_w {
        for r in 0..out_h {
            out_col[r] = padded[r * out_w + c];
        }
        col_ifft.process(&mut out_col);
        for r in 0..out_h {
            padded[r * out_w + c] = out_col[r];
        }
    }
    let scale = 1.0 / (width as f64 * height as f64);
    padded.into_iter().map(|v| v.re * scale).collect()
}

/// Reconstruct a row-major 2D sample grid on an `oversample`-times finer
/// grid; the result is `(height*oversample) x (width*oversample)`.
pub fn reconstruct_2d(
    values: &[f64],
    width: usize,
    height: usize,
    lambda: f64,
    kernel: &LowPassKernel,
    oversample: usize,
) -> Vec<f64> {
    assert_eq!(values.len(), width * height);
    assert!(oversample >= 1);
    match *kernel {
        LowPassKernel::Ideal { cutoff } => {
            reconstruct_ideal_2d(values, width, height, lambda, cutoff, oversample)
        }
        LowPassKernel::Gaussian { std } => {
            reconstruct_gaussian_2d(values, width, height, std, oversample)
        }
    }
}

fn interior_sup_1d(diff_len: usize, margin: f64, diff: impl Fn(usize) -> f64) -> f64 {
    let trim = (margin * diff_len as f64).ceil() as usize;
    let mut sup = 0.0f64;
    for j in trim..diff_len.saturating_sub(trim) {
        sup = sup.max(diff(j).abs());
    }
    sup
}

/// Interior sup-norm of `reconstruct(true samples) - reconstruct(q)` for a
/// 1D quantization of `signal` at rate `lambda`.
pub fn quantization_error_1d(
    signal: &BandlimitedSignal1d,
    q: &[f64],
    lambda: f64,
    kernel: &LowPassKernel,
    interior_margin: f64,
) -> f64 {
    assert!((0.0..0.5).contains(&interior_margin));
    let samples = signal.sample(lambda, q.len());
    let rec_p = reconstruct_1d(&samples, lambda, kernel, EVAL_OVERSAMPLE_1D);
    let rec_q = reconstruct_1d(q, lambda, kernel, EVAL_OVERSAMPLE_1D);
    interior_sup_1d(rec_p.len(), interior_margin, |j| rec_p[j] - rec_q[j])
}

/// 2D analog of [`quantization_error_1d`] for a square halftoned grid.
pub fn quantization_error_2d(
    signal: &BandlimitedSignal2d,
    q: &BinaryImage,
    lambda: f64,
    kernel: &LowPassKernel,
    interior_margin: f64,
) -> f64 {
    assert!((0.0..0.5).contains(&interior_margin));
    assert_eq!(q.width(), q.height(), "decay grids are square");
    let n = q.width();
    let samples = signal.sample_image(lambda, n);
    let q_values: Vec<f64> = q.values().iter().map(|&b| b as f64).collect();
    let rec_p = reconstruct_2d(samples.values(), n, n, lambda, kernel, EVAL_OVERSAMPLE_2D);
    let rec_q = reconstruct_2d(&q_values, n, n, lambda, kernel, EVAL_OVERSAMPLE_2D);
    let side = n * EVAL_OVERSAMPLE_2D;
    let trim = (interior_margin * side as f64).ceil() as usize;
    let mut sup = 0.0f64;
    for r in trim..side - trim {
        for c in trim..side - trim {
            sup = sup.max((rec_p[r * side + c] - rec_q[r * side + c]).abs());
        }
    }
    sup
}

/// Interior sup-norm distance between two pixel grids seen through a
/// low-pass kernel at unit sampling rate; the image-domain quality metric.
pub fn lowpass_sup_error(
    a: &[f64],
    b: &[f64],
    width: usize,
    height: usize,
    kernel: &LowPassKernel,
    margin: f64,
) -> f64 {
    assert_eq!(a.len(), b.len());
    let rec_a = reconstruct_2d(a, width, height, 1.0, kernel, 1);
    let rec_b = reconstruct_2d(b, width, height, 1.0, kernel, 1);
    let trim_r = (margin * height as f64).ceil() as usize;
    let trim_c = (margin * width as f64).ceil() as usize;
    let mut sup = 0.0f64;
    for r in trim_r..height.saturating_sub(trim_r) {
        for c in trim_c..width.saturating_sub(trim_c) {
            sup = sup.max((rec_a[r * width + c] - rec_b[r * width + c]).abs());
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_samples_reconstruct_to_zero() {
        for kernel in [
            LowPassKernel::Ideal { cutoff: 0.5 },
            LowPassKernel::Gaussian { std: 2.0 },
        ] {
            let rec = reconstruct_1d(&[0.0; 32], 4.0, &kernel, 4);
            assert!(rec.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn unit_impulse_gives_symmetric_kernel_translate() {
        let mut values = [0.0; 33];
        values[16] = 1.0;
        let rec = reconstruct_1d(&values, 4.0, &LowPassKernel::Gaussian { std: 1.5 }, 4);
        let center = 16 * 4;
        assert!(rec[center] > 0.0);
        for d in 1..20 {
            assert_relative_eq!(rec[center - d], rec[center + d], epsilon = 1e-15);
            assert!(rec[center + d] < rec[center + d - 1]);
        }
    }

    #[test]
    fn ideal_kernel_recovers_bandlimited_signal_from_samples() {
        let signal = BandlimitedSignal1d::random(8, 0.9, 33);
        let lambda = 4.0;
        let n = (lambda * signal.period()) as usize;
        let samples = signal.sample(lambda, n);
        let s = 4usize;
        let rec = reconstruct_1d(&samples, lambda, &LowPassKernel::Ideal { cutoff: 0.5 }, s);
        for (j, &v) in rec.iter().enumerate() {
            let x = j as f64 / (s as f64 * lambda);
            assert!(
                (v - signal.eval(x)).abs() < 1e-6,
                "at x={x}: {v} vs {}",
                signal.eval(x)
            );
        }
    }

    #[test]
    fn reconstruction_is_linear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let x: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = 1.7;
        let combo: Vec<f64> = x.iter().zip(&y).map(|(&u, &v)| a * u + v).collect();
        for kernel in [
            LowPassKernel::Ideal { cutoff: 0.5 },
            LowPassKernel::Gaussian { std: 1.0 },
        ] {
            let rc = reconstruct_1d(&combo, 4.0, &kernel, 2);
            let rx = reconstruct_1d(&x, 4.0, &kernel, 2);
            let ry = reconstruct_1d(&y, 4.0, &kernel, 2);
            for j in 0..rc.len() {
                assert_relative_eq!(rc[j], a * rx[j] + ry[j], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn shifting_samples_shifts_the_reconstruction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let core: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shift = 3usize;
        let mut padded = vec![0.0; 60];
        padded[5..45].copy_from_slice(&core);
        let mut shifted = vec![0.0; 60];
        shifted[5 + shift..45 + shift].copy_from_slice(&core);
        let s = 4usize;
        let kernel = LowPassKernel::Gaussian { std: 1.0 };
        let ra = reconstruct_1d(&padded, 4.0, &kernel, s);
        let rb = reconstruct_1d(&shifted, 4.0, &kernel, s);
        // compare deep interior away from the zero padding
        for j in 10 * s..35 * s {
            assert_relative_eq!(ra[j], rb[j + shift * s], epsilon = 1e-12);
        }
    }

    #[test]
    fn quantization_error_zero_for_identical_inputs() {
        let signal = BandlimitedSignal1d::random(4, 0.9, 2);
        let lambda = 4.0;
        let n = (lambda * signal.period()) as usize;
        let samples = signal.sample(lambda, n);
        let err = quantization_error_1d(
            &signal,
            &samples,
            lambda,
            &LowPassKernel::Gaussian { std: 1.0 },
            0.1,
        );
        assert_eq!(err, 0.0);
    }

    #[test]
    fn single_interior_sign_flip_is_one_kernel_tap() {
        let signal = BandlimitedSignal1d::random(4, 0.9, 8);
        let lambda = 8.0;
        let n = (lambda * signal.period()) as usize;
        let samples = signal.sample(lambda, n);
        let mut flipped = samples.clone();
        let mid = n / 2;
        let delta = 0.5;
        flipped[mid] += delta;
        let kernel = LowPassKernel::Gaussian { std: 1.25 };
        let err = quantization_error_1d(&signal, &flipped, lambda, &kernel, 0.1);
        // oracle: delta times the kernel peak Phi(0)/lambda
        let expected = delta / (1.25 / lambda * (2.0 * std::f64::consts::PI).sqrt()) / lambda;
        assert_relative_eq!(err, expected, max_relative = 1e-10);
    }

    #[test]
    fn alternating_quantization_noise_is_strongly_suppressed() {
        // constant-zero signal, first-order quantization gives alternating
        // +-1: pure Nyquist-frequency noise, which the kernel attenuates to
        // far below 1/lambda. The bound is a regression guard. The period
        // must be long enough that the window edges sit several kernel
        // widths outside the trimmed interior.
        let signal = BandlimitedSignal1d::from_coeffs(
            8,
            vec![Complex64::new(0.0, 0.0); 17],
            1.0,
        );
        let filter = crate::scheme::FeedbackFilter::first_order();
        for lambda in [8.0f64, 16.0] {
            let n = (lambda * signal.period()) as usize;
            let samples = signal.sample(lambda, n);
            let run = crate::diffusion::run_sigma_delta_1d(&samples, &filter);
            let q: Vec<f64> = run.q.clone();
            assert!(q.windows(2).all(|w| w[0] != w[1]), "not alternating");
            let err = quantization_error_1d(
                &signal,
                &q,
                lambda,
                &LowPassKernel::Gaussian { std: 0.25 * lambda },
                0.1,
            );
            assert!(err <= 1e-6 / lambda, "lambda={lambda}: err={err}");
        }
    }

    #[test]
    fn lowpass_error_zero_for_identical_grids() {
        let a = vec![0.25; 64];
        assert_eq!(
            lowpass_sup_error(&a, &a, 8, 8, &LowPassKernel::Gaussian { std: 2.0 }, 0.1),
            0.0
        );
    }

    #[test]
    fn ideal_2d_recovers_bandlimited_image() {
        let signal = BandlimitedSignal2d::random(4, 0.9, 1);
        let lambda = 4.0;
        let n = (lambda * signal.period()) as usize;
        let img = signal.sample_image(lambda, n);
        let rec = reconstruct_2d(
            img.values(),
            n,
            n,
            lambda,
            &LowPassKernel::Ideal { cutoff: 0.5 },
            2,
        );
        let side = 2 * n;
        for r in (0..side).step_by(7) {
            for c in (0..side).step_by(7) {
                let x1 = c as f64 / (2.0 * lambda);
                let x2 = r as f64 / (2.0 * lambda);
                assert!(
                    (rec[r * side + c] - signal.eval(x1, x2)).abs() < 1e-6,
                    "at ({x1},{x2})"
                );
            }
        }
    }

    #[test]
    fn gaussian_2d_is_separable_product_of_1d_passes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let (w, h) = (12usize, 9usize);
        let values: Vec<f64> = (0..w * h).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let kernel = LowPassKernel::Gaussian { std: 1.0 };
        let rec = reconstruct_2d(&values, w, h, 3.0, &kernel, 2);
        // brute-force separable sum at a few points
        let taps = gaussian_taps(1.0, 2);
        let reach = (taps.len() as i64 - 1) / 2;
        for (jr, jc) in [(5i64, 7i64), (10, 3), (17, 20)] {
            let mut acc = 0.0;
            for r in 0..h as i64 {
                let tr = jr - 2 * r;
                if tr.abs() > reach {
                    continue;
                }
                for c in 0..w as i64 {
                    let tc = jc - 2 * c;
                    if tc.abs() > reach {
                        continue;
                    }
                    acc += values[(r * w as i64 + c) as usize]
                        * taps[(tr + reach) as usize]
                        * taps[(tc + reach) as usize];
                }
            }
            let got = rec[(jr * (2 * w as i64) + jc) as usize];
            assert_relative_eq!(got, acc, epsilon = 1e-12);
        }
    }
}
