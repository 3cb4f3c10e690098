//! Random bandlimited test signals for the decay benchmark.
//!
//! A signal of bandwidth `k_max` is a real trigonometric polynomial with
//! frequencies `k / (2 k_max)` confined to `[-1/2, 1/2]` per axis, hence
//! periodic with period `T = 2 k_max`. Coefficients are drawn from a seeded
//! generator with conjugate symmetry and rescaled so the sup norm over a
//! 16x-oversampled grid equals the requested amplitude bound.

use crate::image::SignedImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

const DENSE_OVERSAMPLE: usize = 16;

fn fft_inverse(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(data.len()).process(data);
}

/// Evaluate an inverse DFT of coefficients placed at signed frequencies:
/// `x_j = sum_k c_k e^{2 pi i k j / n}` for `|k| <= k_max`, `j = 0..n`.
fn eval_on_lattice_1d(coeffs: &[Complex64], k_max: i64, n: usize) -> Vec<Complex64> {
    assert!(n as i64 > 2 * k_max);
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for (idx, &c) in coeffs.iter().enumerate() {
        let k = idx as i64 - k_max;
        let bin = k.rem_euclid(n as i64) as usize;
        bins[bin] += c;
    }
    fft_inverse(&mut bins);
    bins
}

/// Real-valued 1D bandlimited signal.
#[derive(Clone, Debug)]
pub struct BandlimitedSignal1d {
    k_max: i64,
    /// Coefficient for frequency `k` at index `k + k_max`.
    coeffs: Vec<Complex64>,
    bound: f64,
}

impl BandlimitedSignal1d {
    /// Draw coefficients from `seed`, then scale so the dense-grid sup
    /// norm equals `bound`. `k_max = 0` yields the constant signal.
    pub fn random(k_max: i64, bound: f64, seed: u64) -> Self {
        assert!(k_max >= 0);
        assert!(bound > 0.0 && bound <= 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = (2 * k_max + 1) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        coeffs[k_max as usize] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for k in 1..=k_max {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            coeffs[(k_max + k) as usize] = c;
            coeffs[(k_max - k) as usize] = c.conj();
        }
        if k_max == 0 && coeffs[0].re == 0.0 {
            coeffs[0] = Complex64::new(1.0, 0.0);
        }
        let mut signal = BandlimitedSignal1d {
            k_max,
            coeffs,
            bound,
        };
        let sup = signal.dense_sup();
        for c in &mut signal.coeffs {
            *c *= bound / sup;
        }
        signal
    }

    /// Construct from explicit coefficients (index `k + k_max`); used by
    /// tests and by callers that need a specific spectrum.
    pub fn from_coeffs(k_max: i64, coeffs: Vec<Complex64>, bound: f64) -> Self {
        assert_eq!(coeffs.len(), (2 * k_max + 1) as usize);
        BandlimitedSignal1d {
            k_max,
            coeffs,
            bound,
        }
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn amplitude_bound(&self) -> f64 {
        self.bound
    }

    /// Signal period `T = 2 k_max` (1 for the constant signal).
    pub fn period(&self) -> f64 {
        (2 * self.k_max).max(1) as f64
    }

    pub fn dense_sup(&self) -> f64 {
        let n = (DENSE_OVERSAMPLE as i64 * (2 * self.k_max).max(1)) as usize;
        eval_on_lattice_1d(&self.coeffs, self.k_max, n)
            .iter()
            .map(|v| v.re.abs())
            .fold(0.0, f64::max)
    }

    /// Point evaluation of the Fourier sum.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.period();
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let k = idx as i64 - self.k_max;
            acc += c * Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64 * x / t).exp();
        }
        acc.re
    }

    /// Samples `w(n / lambda)` for `n = 0 .. n_samples`, exact from the
    /// coefficient representation. Sampling one full period on an integer
    /// lattice goes through the FFT; anything else is evaluated directly.
    pub fn sample(&self, lambda: f64, n_samples: usize) -> Vec<f64> {
        assert!(lambda > 1.0, "oversampling rate must exceed 1");
        let period_samples = lambda * self.period();
        let rounded = period_samples.round();
        if (period_samples - rounded).abs() < 1e-9
            && n_samples == rounded as usize
            && n_samples as i64 > 2 * self.k_max
        {
            return eval_on_lattice_1d(&self.coeffs, self.k_max, n_samples)
                .iter()
                .map(|v| v.re)
                .collect();
        }
        (0..n_samples)
            .map(|n| self.eval(n as f64 / lambda))
            .collect()
    }
}

/// Real-valued 2D bandlimited signal on the square `[0, T)^2`.
#[derive(Clone, Debug)]
pub struct BandlimitedSignal2d {
    k_max: i64,
    /// Row-major `(2k+1) x (2k+1)`; frequency `(k1, k2)` at
    /// `(k1 + k_max) * side + (k2 + k_max)`.
    coeffs: Vec<Complex64>,
    bound: f64,
}

impl BandlimitedSignal2d {
    pub fn random(k_max: i64, bound: f64, seed: u64) -> Self {
        assert!(k_max >= 0);
        assert!(bound > 0.0 && bound <= 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = (2 * k_max + 1) as usize;
        let at = |k1: i64, k2: i64| -> usize {
            ((k1 + k_max) as usize) * side + (k2 + k_max) as usize
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); side * side];
        coeffs[at(0, 0)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for k1 in -k_max..=k_max {
            for k2 in -k_max..=k_max {
                // fill each conjugate pair once, from its half-plane rep
                if k1 > 0 || (k1 == 0 && k2 > 0) {
                    let c =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    coeffs[at(k1, k2)] = c;
                    coeffs[at(-k1, -k2)] = c.conj();
                }
            }
        }
        if k_max == 0 && coeffs[0].re == 0.0 {
            coeffs[0] = Complex64::new(1.0, 0.0);
        }
        let mut signal = BandlimitedSignal2d {
            k_max,
            coeffs,
            bound,
        };
        let sup = signal.dense_sup();
        for c in &mut signal.coeffs {
            *c *= bound / sup;
        }
        signal
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn amplitude_bound(&self) -> f64 {
        self.bound
    }

    pub fn period(&self) -> f64 {
        (2 * self.k_max).max(1) as f64
    }

    /// Evaluate on an `n x n` lattice over one period via a zero-padded 2D
    /// inverse FFT.
    fn eval_lattice(&self, n: usize) -> Vec<f64> {
        assert!(n as i64 > 2 * self.k_max);
        let side = (2 * self.k_max + 1) as usize;
        let mut grid = vec![Complex64::new(0.0, 0.0); n * n];
        // k1 drives x1 (columns), k2 drives x2 (rows)
        for r in 0..side {
            let k1 = r as i64 - self.k_max;
            let col = k1.rem_euclid(n as i64) as usize;
            for c in 0..side {
                let k2 = c as i64 - self.k_max;
                let row = k2.rem_euclid(n as i64) as usize;
                grid[row * n + col] += self.coeffs[r * side + c];
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(n);
        // rows, then columns
        for row in grid.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                column[r] = grid[r * n + c];
            }
            fft.process(&mut column);
            for r in 0..n {
                grid[r * n + c] = column[r];
            }
        }
        grid.into_iter().map(|v| v.re).collect()
    }

    pub fn dense_sup(&self) -> f64 {
        let n = (DENSE_OVERSAMPLE as i64 * (2 * self.k_max).max(1)) as usize;
        self.eval_lattice(n).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let t = self.period();
        let side = (2 * self.k_max + 1) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..side {
            let k1 = r as i64 - self.k_max;
            for c in 0..side {
                let k2 = c as i64 - self.k_max;
                let t_arg = (k1 as f64 * x1 + k2 as f64 * x2) / t;
                acc += self.coeffs[r * side + c]
                    * Complex64::new(0.0, 2.0 * std::f64::consts::PI * t_arg).exp();
            }
        }
        acc.re
    }

    /// Sample one period on the `n x n` lattice with spacing `1 / lambda`
    /// (`n` must equal `lambda * period`), returned as a signed image with
    /// `x1` along columns and `x2` along rows.
    pub fn sample_image(&self, lambda: f64, n: usize) -> SignedImage {
        let period_samples = lambda * self.period();
        assert!(
            (period_samples - n as f64).abs() < 1e-9,
            "sample lattice must cover exactly one period"
        );
        let values = self.eval_lattice(n);
        SignedImage::new(n, n, values).expect("amplitude bound keeps samples in [-1, 1]")
    }
}
