//! Kernel energies, worst-case quadrature error, and discrepancies.
//!
//! A dot configuration is a good halftone of an image exactly when the
//! empirical measure `lambda * sum_i delta_{p_i}` integrates smooth test
//! functions almost as well as the image measure does. The worst case over
//! the unit ball of a reproducing-kernel space has the closed form
//!
//! ```text
//! err^2 = 2 lambda E_K(p) + |h_w|^2
//! E_K(p) = (lambda/2) sum_{i,j} K(p_i, p_j) - sum_i integral w(x) K(p_i, x) dx
//! ```
//!
//! Integrals over the image are midpoint grid sums with one-pixel cells, so
//! the identity above holds to rounding error; [`quadrature_error`] relies
//! on that. [`fourier_discrepancy`] measures the same deviation band-by-band
//! on the unit torus, and [`ball_discrepancy`] integrates the indicator
//! mismatch over balls.

use crate::attraction::DotConfiguration;
use crate::image::GrayImage;
use crate::point::Point;
use rustfft::num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("kernel is not positive definite; quadrature error is undefined for it")]
    NotPositiveDefinite,
    #[error("quadratic form came out {value}, more negative than the -1e-10 rounding allowance")]
    NegativeQuadraticForm { value: f64 },
    #[error("err^2 argument {value} is below -1e-8; energies and norm disagree")]
    InconsistentQuadrature { value: f64 },
    #[error("Fourier coefficient at {l:?} must be positive (got {value})")]
    BadCoefficient { l: (i64, i64), value: f64 },
    #[error("Fourier coefficient at {l:?} lies outside the bandwidth {bandwidth}")]
    OutOfBand { l: (i64, i64), bandwidth: i64 },
    #[error("Fourier coefficients must be symmetric: lambda_l != lambda_(-l) at {l:?}")]
    AsymmetricCoefficient { l: (i64, i64) },
    #[error("measure weights and support differ in length ({weights} vs {support})")]
    MeasureShape { weights: usize, support: usize },
    #[error("measure weight at index {index} is {value}; weights must be finite and nonnegative")]
    BadWeight { index: usize, value: f64 },
}

/// Radial kernel `K(x, y) = phi(|x - y|)`.
#[derive(Clone, Copy, Debug)]
pub enum RadialKernel {
    /// `exp(-|x-y|^2 / sigma^2)`, positive definite.
    Gaussian { sigma: f64 },
    /// `-|x-y|`, admitted for energy evaluation only: it is conditionally
    /// positive definite, so quadrature errors are not defined for it.
    NegativeDistance,
}

impl RadialKernel {
    pub fn eval(&self, a: Point, b: Point) -> f64 {
        match *self {
            RadialKernel::Gaussian { sigma } => {
                let d = a - b;
                let d2 = d.x * d.x + d.y * d.y;
                (-d2 / (sigma * sigma)).exp()
            }
            RadialKernel::NegativeDistance => -a.dist(b),
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self, RadialKernel::Gaussian { .. })
    }
}

/// Bandlimited kernel on the unit torus given by positive symmetric
/// coefficients `lambda_l` for `|l|_inf <= N`.
#[derive(Clone, Debug)]
pub struct FourierKernel {
    bandwidth: i64,
    coeffs: BTreeMap<(i64, i64), f64>,
}

impl FourierKernel {
    pub fn new(bandwidth: i64, coeffs: BTreeMap<(i64, i64), f64>) -> Result<Self, MetricError> {
        for (&l, &value) in &coeffs {
            if value <= 0.0 || !value.is_finite() {
                return Err(MetricError::BadCoefficient { l, value });
            }
            if l.0.abs() > bandwidth || l.1.abs() > bandwidth {
                return Err(MetricError::OutOfBand { l, bandwidth });
            }
            let mirrored = coeffs.get(&(-l.0, -l.1)).copied();
            if mirrored != Some(value) {
                return Err(MetricError::AsymmetricCoefficient { l });
            }
        }
        Ok(FourierKernel { bandwidth, coeffs })
    }

    /// Low-pass-weighted profile `lambda_l = (1 + |l|^2)^(-3/2)` over the
    /// full square `|l|_inf <= bandwidth`.
    pub fn default_profile(bandwidth: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for l1 in -bandwidth..=bandwidth {
            for l2 in -bandwidth..=bandwidth {
                let norm2 = (l1 * l1 + l2 * l2) as f64;
                coeffs.insert((l1, l2), (1.0 + norm2).powf(-1.5));
            }
        }
        FourierKernel { bandwidth, coeffs }
    }

    pub fn bandwidth(&self) -> i64 {
        self.bandwidth
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ((i64, i64), f64)> + '_ {
        self.coeffs.iter().map(|(&l, &v)| (l, v))
    }
}

/// Weighted point masses; the discretization of the image measure
/// (`weight = 1 - u` per pixel, unit pixel area) or an empirical dot
/// measure.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    support: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<Point>, weights: Vec<f64>) -> Result<Self, MetricError> {
        if support.len() != weights.len() {
            return Err(MetricError::MeasureShape {
                weights: weights.len(),
                support: support.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(MetricError::BadWeight { index, value });
            }
        }
        Ok(DiscreteMeasure { support, weights })
    }

    /// Grid measure of an image: mass `1 - u` at every pixel center.
    pub fn from_gray(image: &GrayImage) -> Self {
        let mut support = Vec::with_capacity(image.values().len());
        let mut weights = Vec::with_capacity(image.values().len());
        for row in 0..image.height() {
            for col in 0..image.width() {
                support.push(Point::new(col as f64 + 1.0, row as f64 + 1.0));
                weights.push(1.0 - image.get(row, col));
            }
        }
        DiscreteMeasure { support, weights }
    }

    pub fn support(&self) -> &[Point] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// The kernel interaction energy `E_K`.
pub fn kernel_energy(
    config: &DotConfiguration,
    image_measure: &DiscreteMeasure,
    kernel: &RadialKernel,
    lambda: f64,
) -> f64 {
    let dots = config.positions();
    let mut pair = 0.0;
    for &a in dots {
        for &b in dots {
            pair += kernel.eval(a, b);
        }
    }
    let mut cross = 0.0;
    for &p in dots {
        for (x, w) in image_measure
            .support()
            .iter()
            .zip(image_measure.weights())
        {
            cross += w * kernel.eval(p, *x);
        }
    }
    lambda / 2.0 * pair - cross
}

/// Squared norm of the image potential `h_w`: the double grid sum
/// `sum_x sum_y w(x) w(y) K(x, y)`.
pub fn hw_norm_sq(
    image_measure: &DiscreteMeasure,
    kernel: &RadialKernel,
) -> Result<f64, MetricError> {
    if !kernel.is_positive_definite() {
        return Err(MetricError::NotPositiveDefinite);
    }
    let mut total = 0.0;
    let pts = image_measure.support();
    let ws = image_measure.weights();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            total += ws[i] * ws[j] * kernel.eval(pts[i], pts[j]);
        }
    }
    if total < -1e-10 {
        return Err(MetricError::NegativeQuadraticForm { value: total });
    }
    Ok(total.max(0.0))
}

/// Worst-case quadrature error `sqrt(2 lambda E_K + |h_w|^2)` of the
/// empirical measure against the image measure.
pub fn quadrature_error(
    config: &DotConfiguration,
    image_measure: &DiscreteMeasure,
    kernel: &RadialKernel,
    lambda: f64,
) -> Result<f64, MetricError> {
    let arg = 2.0 * lambda * kernel_energy(config, image_measure, kernel, lambda)
        + hw_norm_sq(image_measure, kernel)?;
    if arg < -1e-8 {
        return Err(MetricError::InconsistentQuadrature { value: arg });
    }
    Ok(arg.max(0.0).sqrt())
}

/// Map a point in image coordinates onto the unit torus: pixel centers go
/// to `((col + 1/2) / width, (row + 1/2) / height)`.
pub fn torus_coords(p: Point, width: usize, height: usize) -> (f64, f64) {
    ((p.x - 0.5) / width as f64, (p.y - 0.5) / height as f64)
}

fn phase(t: f64) -> Complex64 {
    Complex64::new(0.0, -2.0 * std::f64::consts::PI * t).exp()
}

/// Fourier coefficients of the pixel weight field on the unit torus,
/// `w_hat(l) = (1/WH) sum w(pixel) exp(-2 pi i l . x_pixel)`, computed
/// separably for all `|l|_inf <= bandwidth`.
fn weight_spectrum(image: &GrayImage, bandwidth: i64) -> BTreeMap<(i64, i64), Complex64> {
    let (width, height) = (image.width(), image.height());
    // row stage: R(l1, row) = sum_col w(row,col) e(-2 pi i l1 x1(col))
    let mut row_stage = vec![Complex64::new(0.0, 0.0); (2 * bandwidth as usize + 1) * height];
    for (li, l1) in (-bandwidth..=bandwidth).enumerate() {
        for row in 0..height {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..width {
                let x1 = (col as f64 + 0.5) / width as f64;
                acc += (1.0 - image.get(row, col)) * phase(l1 as f64 * x1);
            }
            row_stage[li * height + row] = acc;
        }
    }
    let norm = 1.0 / (width as f64 * height as f64);
    let mut out = BTreeMap::new();
    for (li, l1) in (-bandwidth..=bandwidth).enumerate() {
        for l2 in -bandwidth..=bandwidth {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in 0..height {
                let x2 = (row as f64 + 0.5) / height as f64;
                acc += row_stage[li * height + row] * phase(l2 as f64 * x2);
            }
            out.insert((l1, l2), acc * norm);
        }
    }
    out
}

/// Low-pass-weighted discrepancy between the dots and the image on the
/// unit torus:
/// `err^2 = sum_l lambda_l | lambda sum_i conj(phi_l(p_i)) - w_hat_l |^2`.
pub fn fourier_discrepancy(
    config: &DotConfiguration,
    image: &GrayImage,
    kernel: &FourierKernel,
    lambda: f64,
) -> f64 {
    let (width, height) = (image.width(), image.height());
    let spectrum = weight_spectrum(image, kernel.bandwidth());
    let dots: Vec<(f64, f64)> = config
        .positions()
        .iter()
        .map(|&p| torus_coords(p, width, height))
        .collect();
    let mut err2 = 0.0;
    for (l, coeff) in kernel.coeffs() {
        let mut empirical = Complex64::new(0.0, 0.0);
        for &(t1, t2) in &dots {
            empirical += phase(l.0 as f64 * t1 + l.1 as f64 * t2);
        }
        let what = spectrum.get(&l).copied().unwrap_or_default();
        let deviation = lambda * empirical - what;
        err2 += coeff * deviation.norm_sqr();
    }
    err2.max(0.0).sqrt()
}

/// L2 ball discrepancy: integrates the squared mismatch between image mass
/// and `lambda`-weighted dot counts over balls centered at every pixel with
/// `resolution` midpoint radii up to `radius_max`.
pub fn ball_discrepancy(
    config: &DotConfiguration,
    image: &GrayImage,
    radius_max: f64,
    resolution: usize,
    lambda: f64,
) -> f64 {
    assert!(radius_max > 0.0 && resolution > 0);
    let (width, height) = (image.width(), image.height());
    let dr = radius_max / resolution as f64;
    let radii: Vec<f64> = (0..resolution).map(|j| (j as f64 + 0.5) * dr).collect();

    // Pixel masses and positions, flattened once.
    let pixels: Vec<(Point, f64)> = (0..height)
        .flat_map(|row| {
            (0..width).map(move |col| {
                (
                    Point::new(col as f64 + 1.0, row as f64 + 1.0),
                    row * width + col,
                )
            })
        })
        .map(|(p, idx)| (p, 1.0 - image.values()[idx]))
        .collect();

    let mut total = 0.0;
    let mut pixel_dists: Vec<(f64, f64)> = Vec::with_capacity(pixels.len());
    let mut dot_dists: Vec<f64> = Vec::with_capacity(config.len());
    for row in 0..height {
        for col in 0..width {
            let center = Point::new(col as f64 + 1.0, row as f64 + 1.0);
            pixel_dists.clear();
            pixel_dists.extend(pixels.iter().map(|&(p, w)| (center.dist(p), w)));
            pixel_dists.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut mass_prefix = Vec::with_capacity(pixel_dists.len());
            let mut acc = 0.0;
            for &(_, w) in &pixel_dists {
                acc += w;
                mass_prefix.push(acc);
            }
            dot_dists.clear();
            dot_dists.extend(config.positions().iter().map(|&p| center.dist(p)));
            dot_dists.sort_by(f64::total_cmp);

            for &r in &radii {
                let image_mass = match pixel_dists.partition_point(|&(d, _)| d <= r) {
                    0 => 0.0,
                    n => mass_prefix[n - 1],
                };
                let covered = dot_dists.partition_point(|&d| d <= r);
                let deviation = image_mass - lambda * covered as f64;
                total += deviation * deviation;
            }
        }
    }
    (total * dr).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attraction::DotConfiguration;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian(sigma: f64) -> RadialKernel {
        RadialKernel::Gaussian { sigma }
    }

    fn zero_measure(width: usize, height: usize) -> DiscreteMeasure {
        DiscreteMeasure::from_gray(&GrayImage::constant(width, height, 1.0).unwrap())
    }

    #[test]
    fn kernel_energy_self_term_only() {
        let cfg = DotConfiguration::new(vec![Point::new(1.5, 1.5)]).unwrap();
        let k = gaussian(1.0);
        let e = kernel_energy(&cfg, &zero_measure(3, 3), &k, 2.0);
        assert_eq!(e, 1.0); // (lambda/2) * K(p,p) = 1
    }

    #[test]
    fn kernel_energy_coincident_pair() {
        let cfg =
            DotConfiguration::new(vec![Point::new(2.0, 2.0), Point::new(2.0, 2.0)]).unwrap();
        let e = kernel_energy(&cfg, &zero_measure(3, 3), &gaussian(1.0), 1.0);
        assert_eq!(e, 2.0); // four unit kernel terms, halved
    }

    #[test]
    fn kernel_energy_matches_double_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..9).map(|_| rng.gen_range(0.0..1.0)).collect();
        let image = GrayImage::new(3, 3, values).unwrap();
        let measure = DiscreteMeasure::from_gray(&image);
        let dots: Vec<Point> = (0..3)
            .map(|_| Point::new(rng.gen_range(1.0..3.0), rng.gen_range(1.0..3.0)))
            .collect();
        let cfg = DotConfiguration::new(dots.clone()).unwrap();
        let k = gaussian(1.7);
        let lambda = 0.8;

        // independent brute-force oracle
        let mut pair = 0.0;
        for &a in &dots {
            for &b in &dots {
                pair += (-(a.dist(b).powi(2)) / (1.7f64 * 1.7)).exp();
            }
        }
        let mut cross = 0.0;
        for &p in &dots {
            for row in 0..3 {
                for col in 0..3 {
                    let g = Point::new(col as f64 + 1.0, row as f64 + 1.0);
                    let w = 1.0 - image.get(row, col);
                    cross += w * (-(p.dist(g).powi(2)) / (1.7f64 * 1.7)).exp();
                }
            }
        }
        let expected = lambda / 2.0 * pair - cross;
        assert_relative_eq!(
            kernel_energy(&cfg, &measure, &k, lambda),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hw_norm_examples() {
        assert_eq!(hw_norm_sq(&zero_measure(2, 2), &gaussian(1.0)).unwrap(), 0.0);
        let single = DiscreteMeasure::new(vec![Point::new(1.0, 1.0)], vec![1.0]).unwrap();
        assert_eq!(hw_norm_sq(&single, &gaussian(1.0)).unwrap(), 1.0);
        assert!(hw_norm_sq(&single, &RadialKernel::NegativeDistance).is_err());
    }

    #[test]
    fn hw_norm_equals_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..1.0)).collect();
        let image = GrayImage::new(4, 4, values).unwrap();
        let measure = DiscreteMeasure::from_gray(&image);
        let k = gaussian(2.0);
        // dense-matrix oracle: w^T K w
        let pts = measure.support();
        let ws = measure.weights();
        let mut expected = 0.0;
        for i in 0..16 {
            for j in 0..16 {
                expected += ws[i] * ws[j] * k.eval(pts[i], pts[j]);
            }
        }
        assert_relative_eq!(hw_norm_sq(&measure, &k).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn quadrature_error_single_dot_no_image() {
        let cfg = DotConfiguration::new(vec![Point::new(1.0, 2.0)]).unwrap();
        let err = quadrature_error(&cfg, &zero_measure(3, 3), &gaussian(1.0), 1.0).unwrap();
        assert_relative_eq!(err, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quadrature_error_vanishes_for_matching_measures() {
        let dots = vec![Point::new(1.2, 2.1), Point::new(2.7, 1.4)];
        let lambda = 0.6;
        let measure = DiscreteMeasure::new(dots.clone(), vec![lambda, lambda]).unwrap();
        let cfg = DotConfiguration::new(dots).unwrap();
        let err = quadrature_error(&cfg, &measure, &gaussian(1.3), lambda).unwrap();
        assert!(err < 1e-8, "err = {err}");
    }

    #[test]
    fn quadrature_identity_holds_under_shared_discretization() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let w = rng.gen_range(2..6usize);
            let h = rng.gen_range(2..6usize);
            let values: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..1.0)).collect();
            let image = GrayImage::new(w, h, values).unwrap();
            let measure = DiscreteMeasure::from_gray(&image);
            let m = rng.gen_range(1..6usize);
            let dots: Vec<Point> = (0..m)
                .map(|_| {
                    Point::new(
                        rng.gen_range(1.0..w as f64),
                        rng.gen_range(1.0..h as f64),
                    )
                })
                .collect();
            let cfg = DotConfiguration::new(dots.clone()).unwrap();
            let kernel = gaussian(rng.gen_range(0.8..3.0));
            let lambda = measure.total() / m as f64;

            let err = quadrature_error(&cfg, &measure, &kernel, lambda).unwrap();
            // expand err^2 = lambda^2 sum K(p_i,p_j) - 2 lambda sum h_w(p_i) + |h_w|^2
            let mut pair = 0.0;
            for &a in &dots {
                for &b in &dots {
                    pair += kernel.eval(a, b);
                }
            }
            let mut hw_at = 0.0;
            for &p in &dots {
                for (x, wgt) in measure.support().iter().zip(measure.weights()) {
                    hw_at += wgt * kernel.eval(p, *x);
                }
            }
            let direct =
                lambda * lambda * pair - 2.0 * lambda * hw_at + hw_norm_sq(&measure, &kernel).unwrap();
            let err2 = err * err;
            assert!(
                (err2 - direct).abs() <= 1e-10 * err2.abs().max(1e-30),
                "identity violated: {err2} vs {direct}"
            );
        }
    }

    #[test]
    fn fourier_kernel_validation() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((1, 0), 1.0);
        assert!(matches!(
            FourierKernel::new(1, coeffs.clone()),
            Err(MetricError::AsymmetricCoefficient { .. })
        ));
        coeffs.insert((-1, 0), 1.0);
        assert!(FourierKernel::new(1, coeffs.clone()).is_ok());
        coeffs.insert((0, 0), -2.0);
        assert!(matches!(
            FourierKernel::new(1, coeffs),
            Err(MetricError::BadCoefficient { .. })
        ));
    }

    #[test]
    fn fourier_discrepancy_single_dot_single_frequency() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((1, 0), 1.0);
        coeffs.insert((-1, 0), 1.0);
        let kernel = FourierKernel::new(1, coeffs).unwrap();
        let image = GrayImage::constant(4, 4, 1.0).unwrap(); // w = 0
        let dot = Point::new(1.7, 2.2);
        let cfg = DotConfiguration::new(vec![dot]).unwrap();
        let lambda = 0.3;
        let got = fourier_discrepancy(&cfg, &image, &kernel, lambda);
        // |lambda e^{-2 pi i x1}| at both +-(1,0): sqrt(2) * lambda
        assert_relative_eq!(got, lambda * 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn fourier_discrepancy_vanishes_on_matching_lattice() {
        // constant gray 0.5 -> w = 0.5; 16 dots on a 4x4 sublattice of an
        // 8x8 image; all nonzero frequencies below the lattice density
        // cancel, and lambda = w_hat(0)/m kills the DC band.
        let image = GrayImage::constant(8, 8, 0.5).unwrap();
        let mut dots = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                dots.push(Point::new(0.5 + 8.0 * (a as f64 + 0.5) / 4.0,
                                     0.5 + 8.0 * (b as f64 + 0.5) / 4.0));
            }
        }
        let cfg = DotConfiguration::new(dots).unwrap();
        let kernel = FourierKernel::default_profile(3);
        let lambda = 0.5 / 16.0;
        let err = fourier_discrepancy(&cfg, &image, &kernel, lambda);
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn fourier_discrepancy_matches_mercer_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let w = rng.gen_range(3..7usize);
            let h = rng.gen_range(3..7usize);
            let values: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..1.0)).collect();
            let image = GrayImage::new(w, h, values).unwrap();
            let dots: Vec<Point> = (0..3)
                .map(|_| Point::new(rng.gen_range(1.0..w as f64), rng.gen_range(1.0..h as f64)))
                .collect();
            let cfg = DotConfiguration::new(dots.clone()).unwrap();
            let kernel = FourierKernel::default_profile(2);
            let lambda = rng.gen_range(0.01..0.2);

            let direct = fourier_discrepancy(&cfg, &image, &kernel, lambda);

            // Mercer-side oracle: err^2 = lambda^2 sum K_N(p_i,p_j)
            //   - 2 lambda sum_i h_w(p_i) + |h_w|^2 with
            // K_N(x,y) = sum_l lambda_l e^{2 pi i l (x - y)}.
            let torus: Vec<(f64, f64)> = dots
                .iter()
                .map(|&p| torus_coords(p, w, h))
                .collect();
            let pixels: Vec<((f64, f64), f64)> = (0..h)
                .flat_map(|r| (0..w).map(move |c| (r, c)))
                .map(|(r, c)| {
                    (
                        ((c as f64 + 0.5) / w as f64, (r as f64 + 0.5) / h as f64),
                        (1.0 - image.get(r, c)) / (w as f64 * h as f64),
                    )
                })
                .collect();
            let kn = |a: (f64, f64), b: (f64, f64)| -> f64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, coeff) in kernel.coeffs() {
                    let t = l.0 as f64 * (a.0 - b.0) + l.1 as f64 * (a.1 - b.1);
                    acc += coeff * Complex64::new(0.0, 2.0 * std::f64::consts::PI * t).exp();
                }
                acc.re
            };
            let mut pair = 0.0;
            for &a in &torus {
                for &b in &torus {
                    pair += kn(a, b);
                }
            }
            let mut cross = 0.0;
            for &p in &torus {
                for &(x, mass) in &pixels {
                    cross += mass * kn(p, x);
                }
            }
            let mut norm = 0.0;
            for &(x, mx) in &pixels {
                for &(y, my) in &pixels {
                    norm += mx * my * kn(x, y);
                }
            }
            let mercer = (lambda * lambda * pair - 2.0 * lambda * cross + norm)
                .max(0.0)
                .sqrt();
            assert!(
                (direct - mercer).abs() <= 1e-8,
                "fourier {direct} vs mercer {mercer}"
            );
        }
    }

    #[test]
    fn metrics_are_permutation_invariant() {
        let image = GrayImage::new(3, 3, vec![0.1, 0.9, 0.4, 0.3, 0.8, 0.2, 0.6, 0.5, 0.7]).unwrap();
        let measure = DiscreteMeasure::from_gray(&image);
        let dots = vec![
            Point::new(1.1, 2.3),
            Point::new(2.8, 1.2),
            Point::new(1.9, 2.9),
        ];
        let mut swapped = dots.clone();
        swapped.swap(0, 2);
        let a = DotConfiguration::new(dots).unwrap();
        let b = DotConfiguration::new(swapped).unwrap();
        let k = gaussian(1.5);
        assert_relative_eq!(
            quadrature_error(&a, &measure, &k, 1.0).unwrap(),
            quadrature_error(&b, &measure, &k, 1.0).unwrap(),
            epsilon = 1e-12
        );
        let fk = FourierKernel::default_profile(2);
        assert_relative_eq!(
            fourier_discrepancy(&a, &image, &fk, 0.1),
            fourier_discrepancy(&b, &image, &fk, 0.1),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            ball_discrepancy(&a, &image, 2.0, 8, 0.1),
            ball_discrepancy(&b, &image, 2.0, 8, 0.1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn ball_discrepancy_zero_for_identical_measures() {
        // single pixel of weight 1 (gray 0) at (1,1); dot on top of it
        let image = GrayImage::new(1, 1, vec![0.0]).unwrap();
        let cfg = DotConfiguration::new(vec![Point::new(1.0, 1.0)]).unwrap();
        assert_eq!(ball_discrepancy(&cfg, &image, 1.5, 12, 1.0), 0.0);
    }

    #[test]
    fn ball_discrepancy_counts_coverage_of_single_dot() {
        // zero image: only the dot contributes; disc^2 = lambda^2 *
        // measure{(c, r): |c - p| <= r}. Count the covering pairs directly.
        let image = GrayImage::constant(3, 3, 1.0).unwrap();
        let dot = Point::new(2.0, 2.0);
        let cfg = DotConfiguration::new(vec![dot]).unwrap();
        let radius_max = 2.0;
        let resolution = 10;
        let lambda = 0.7;
        let dr = radius_max / resolution as f64;
        let mut covered = 0usize;
        for row in 0..3 {
            for col in 0..3 {
                let c = Point::new(col as f64 + 1.0, row as f64 + 1.0);
                for j in 0..resolution {
                    let r = (j as f64 + 0.5) * dr;
                    if c.dist(dot) <= r {
                        covered += 1;
                    }
                }
            }
        }
        let expected = lambda * ((covered as f64) * dr).sqrt();
        assert_relative_eq!(
            ball_discrepancy(&cfg, &image, radius_max, resolution, lambda),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ball_discrepancy_self_converges_in_resolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let values: Vec<f64> = (0..25).map(|_| rng.gen_range(0.0..1.0)).collect();
        let image = GrayImage::new(5, 5, values).unwrap();
        let dots: Vec<Point> = (0..4)
            .map(|_| Point::new(rng.gen_range(1.0..5.0), rng.gen_range(1.0..5.0)))
            .collect();
        let cfg = DotConfiguration::new(dots).unwrap();
        let coarse = ball_discrepancy(&cfg, &image, 3.0, 64, 0.3);
        let fine = ball_discrepancy(&cfg, &image, 3.0, 128, 0.3);
        assert!(
            (coarse - fine).abs() <= 0.01 * fine.abs(),
            "{coarse} vs {fine}"
        );
    }
}
