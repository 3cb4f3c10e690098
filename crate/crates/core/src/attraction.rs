//! Analog halftoning by attraction-repulsion particle dynamics.
//!
//! Dark pixels act as stationary attractors with strength `w = 1 - u`;
//! dots repel each other. Two drivers are provided: [`evolve`], the
//! electrostatic force iteration, and [`subgradient_descent`], which
//! minimizes the energy
//!
//! ```text
//! E(p) = sum_k sum_(i,j) w(i,j) |p_k - (i,j)|  -  lambda sum_{k<l} |p_k - p_l|
//! ```
//!
//! directly with step halving. [`snap_to_grid`] converts the continuous
//! configuration into a binary pixel image at the end.

use crate::image::{BinaryImage, GrayImage};
use crate::point::Point;
use crate::util::fmt_sig;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Pairwise terms closer than this are skipped instead of regularized,
/// which leaves the energy exact away from collisions.
const SINGULARITY_EPS: f64 = 1e-12;

/// Step sizes below this stop the descent.
const STEP_UNDERFLOW: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AttractionError {
    #[error("image weight sum {sum} is below 0.5; essentially white input has no dots to place")]
    DegenerateInput { sum: f64 },
    #[error("{dots} dots exceed the {cells} available grid cells")]
    Capacity { dots: usize, cells: usize },
    #[error("non-finite force encountered at iteration {iteration}")]
    NonFiniteForce { iteration: usize },
    #[error("dot configuration must contain at least one dot")]
    EmptyConfiguration,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Weights `w = 1 - u` on the pixel grid. Pixel `(row, col)` sits at the
/// grid point `(x, y) = (col + 1, row + 1)`.
#[derive(Clone, Debug)]
pub struct WeightField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl WeightField {
    pub fn from_image(image: &GrayImage) -> Self {
        WeightField {
            width: image.width(),
            height: image.height(),
            values: image.values().iter().map(|&u| 1.0 - u).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn grid_point(row: usize, col: usize) -> Point {
        Point::new(col as f64 + 1.0, row as f64 + 1.0)
    }

    /// Grid points with their weights, row-major.
    pub fn points(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        (0..self.height).flat_map(move |row| {
            (0..self.width).map(move |col| {
                (
                    Self::grid_point(row, col),
                    self.values[row * self.width + col],
                )
            })
        })
    }
}

/// Ordered list of continuous dot positions in `[1, width] x [1, height]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DotConfiguration {
    positions: Vec<Point>,
}

impl DotConfiguration {
    pub fn new(positions: Vec<Point>) -> Result<Self, AttractionError> {
        if positions.is_empty() {
            return Err(AttractionError::EmptyConfiguration);
        }
        Ok(DotConfiguration { positions })
    }

    /// `m` positions drawn uniformly in the domain from a seeded generator.
    pub fn random(m: usize, width: usize, height: usize, seed: u64) -> Result<Self, AttractionError> {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..m)
            .map(|_| {
                Point::new(
                    rng.gen_range(1.0..=width as f64),
                    rng.gen_range(1.0..=height as f64),
                )
            })
            .collect();
        Self::new(positions)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// CSV with an `x,y` header and 9 significant digits per coordinate.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.positions {
            out.push_str(&fmt_sig(p.x, 9));
            out.push(',');
            out.push_str(&fmt_sig(p.y, 9));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), AttractionError> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }
}

/// Parameters of the iterative drivers.
#[derive(Clone, Copy, Debug)]
pub struct EvolutionParams {
    /// Step size of the force iteration, also the initial descent step.
    pub tau: f64,
    pub max_iters: usize,
    /// Convergence threshold on the largest particle displacement.
    pub tol: f64,
    pub seed: u64,
    /// Cap on the per-iteration displacement of a single dot (pixels).
    /// The pairwise force grows like 1/distance, so uncapped steps make
    /// close encounters leapfrog chaotically; the cap is inactive once
    /// dots are separated.
    pub max_step: f64,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            tau: 0.1,
            max_iters: 1000,
            tol: 1e-4,
            seed: 0,
            max_step: 0.5,
        }
    }
}

/// Number of dots that preserves the mean gray value:
/// `round(sum of weights)`, at least 1.
pub fn dot_count(image: &GrayImage) -> Result<usize, AttractionError> {
    let sum: f64 = image.values().iter().map(|&u| 1.0 - u).sum();
    if sum < 0.5 {
        return Err(AttractionError::DegenerateInput { sum });
    }
    Ok((sum.round() as usize).max(1))
}

/// The averaged image weight that balances attraction against repulsion.
pub fn equilibration_lambda(weights: &WeightField, m: usize) -> f64 {
    assert!(m >= 1);
    weights.sum() / m as f64
}

/// Attraction-repulsion energy of a configuration.
pub fn energy(config: &DotConfiguration, weights: &WeightField, lambda: f64) -> f64 {
    let dots = config.positions();
    // per-dot terms in parallel, reduced in fixed dot order so repeated
    // runs are bit-identical
    let per_dot: Vec<f64> = dots
        .par_iter()
        .map(|&p| {
            let mut acc = 0.0;
            for (x, w) in weights.points() {
                acc += w * p.dist(x);
            }
            acc
        })
        .collect();
    let attraction: f64 = per_dot.iter().sum();
    let mut repulsion = 0.0;
    for k in 0..dots.len() {
        for l in k + 1..dots.len() {
            repulsion += dots[k].dist(dots[l]);
        }
    }
    attraction - lambda * repulsion
}

/// Electrostatic forces `F_k = F_k^(A) - F_k^(R)`: grid points pull with
/// strength `w / dist`, other dots push with strength `1 / dist`.
/// Terms closer than the singularity guard are skipped.
pub fn forces(config: &DotConfiguration, weights: &WeightField) -> Vec<Point> {
    let dots = config.positions();
    dots.par_iter()
        .enumerate()
        .map(|(k, &p)| {
            let mut f = Point::new(0.0, 0.0);
            for (x, w) in weights.points() {
                let delta = x - p;
                let dist = delta.norm();
                if dist < SINGULARITY_EPS {
                    continue;
                }
                // (w / dist) in the unit direction = w * delta / dist^2
                f = f + delta * (w / (dist * dist));
            }
            for (l, &other) in dots.iter().enumerate() {
                if l == k {
                    continue;
                }
                let delta = other - p;
                let dist = delta.norm();
                if dist < SINGULARITY_EPS {
                    continue;
                }
                f = f - delta * (1.0 / (dist * dist));
            }
            f
        })
        .collect()
}

/// Subgradient of the energy: unit vectors toward each dot scaled by the
/// pixel weight, minus `lambda` times unit vectors between dots.
pub fn energy_subgradient(
    config: &DotConfiguration,
    weights: &WeightField,
    lambda: f64,
) -> Vec<Point> {
    let dots = config.positions();
    dots.par_iter()
        .enumerate()
        .map(|(k, &p)| {
            let mut g = Point::new(0.0, 0.0);
            for (x, w) in weights.points() {
                let delta = p - x;
                let dist = delta.norm();
                if dist < SINGULARITY_EPS {
                    continue;
                }
                g = g + delta * (w / dist);
            }
            for (l, &other) in dots.iter().enumerate() {
                if l == k {
                    continue;
                }
                let delta = p - other;
                let dist = delta.norm();
                if dist < SINGULARITY_EPS {
                    continue;
                }
                g = g - delta * (lambda / dist);
            }
            g
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Largest displacement fell below `tol`.
    Converged,
    MaxIters,
    /// Descent step size underflowed; the best iterate so far is returned.
    Stagnated,
}

#[derive(Clone, Debug)]
pub struct RelaxationRun {
    pub config: DotConfiguration,
    pub iterations: usize,
    pub stop: StopReason,
}

/// Force iteration: `p_k <- clamp(p_k + tau * F_k)` until the largest step
/// falls below `tol` or `max_iters` is reached.
pub fn evolve(
    config: &DotConfiguration,
    weights: &WeightField,
    params: &EvolutionParams,
) -> Result<RelaxationRun, AttractionError> {
    let mut positions = config.positions().to_vec();
    let (width, height) = (weights.width(), weights.height());
    let mut iterations = 0;
    let mut stop = StopReason::MaxIters;
    while iterations < params.max_iters {
        let current = DotConfiguration {
            positions: positions.clone(),
        };
        let fs = forces(&current, weights);
        iterations += 1;
        let mut max_disp = 0.0f64;
        for (p, f) in positions.iter_mut().zip(&fs) {
            if !f.is_finite() {
                return Err(AttractionError::NonFiniteForce { iteration: iterations });
            }
            let mut step = *f * params.tau;
            let len = step.norm();
            if len > params.max_step {
                step = step * (params.max_step / len);
            }
            let next = (*p + step).clamp_to_domain(width, height);
            max_disp = max_disp.max(next.dist(*p));
            *p = next;
        }
        if max_disp < params.tol {
            stop = StopReason::Converged;
            break;
        }
    }
    Ok(RelaxationRun {
        config: DotConfiguration { positions },
        iterations,
        stop,
    })
}

/// Plain subgradient descent on the energy with step halving: a step is
/// accepted only when it does not increase the energy, so accepted energies
/// are monotone non-increasing. The step resets to `tau` after every
/// accepted move; repeated halving without acceptance down to the underflow
/// floor stops the run with the best iterate found.
pub fn subgradient_descent(
    config: &DotConfiguration,
    weights: &WeightField,
    lambda: f64,
    params: &EvolutionParams,
) -> Result<RelaxationRun, AttractionError> {
    let (width, height) = (weights.width(), weights.height());
    let mut current = config.clone();
    let mut current_energy = energy(&current, weights, lambda);
    let mut step = params.tau;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIters;
    while iterations < params.max_iters {
        let grad = energy_subgradient(&current, weights, lambda);
        iterations += 1;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AttractionError::NonFiniteForce { iteration: iterations });
        }
        let candidate = DotConfiguration {
            positions: current
                .positions()
                .iter()
                .zip(&grad)
                .map(|(&p, &g)| (p - g * step).clamp_to_domain(width, height))
                .collect(),
        };
        let candidate_energy = energy(&candidate, weights, lambda);
        if candidate_energy <= current_energy {
            let max_disp = current
                .positions()
                .iter()
                .zip(candidate.positions())
                .map(|(a, b)| a.dist(*b))
                .fold(0.0f64, f64::max);
            current = candidate;
            current_energy = candidate_energy;
            if max_disp < params.tol {
                stop = StopReason::Converged;
                break;
            }
            step = params.tau;
        } else {
            step /= 2.0;
            if step < STEP_UNDERFLOW {
                stop = StopReason::Stagnated;
                break;
            }
        }
    }
    Ok(RelaxationRun {
        config: current,
        iterations,
        stop,
    })
}

/// Round each dot to its nearest grid cell and paint it black. A dot whose
/// cell is already taken moves to the nearest free cell (Euclidean
/// distance from the contested cell, ties broken in row-major order).
pub fn snap_to_grid(
    config: &DotConfiguration,
    width: usize,
    height: usize,
) -> Result<BinaryImage, AttractionError> {
    let cells = width * height;
    let m = config.len();
    if m > cells {
        return Err(AttractionError::Capacity { dots: m, cells });
    }
    let mut occupied = vec![false; cells];
    for p in config.positions() {
        let col = (p.x.round() as i64).clamp(1, width as i64) as usize - 1;
        let row = (p.y.round() as i64).clamp(1, height as i64) as usize - 1;
        let idx = row * width + col;
        let target = if occupied[idx] {
            nearest_free_cell(&occupied, width, height, row, col)
                .expect("capacity was checked, a free cell exists")
        } else {
            idx
        };
        occupied[target] = true;
    }
    let values = occupied.iter().map(|&b| if b { -1 } else { 1 }).collect();
    Ok(BinaryImage::from_signs_unchecked(width, height, values))
}

/// Expanding-ring search for the free cell nearest to `(row, col)`.
/// Scans Chebyshev rings, keeping the best `(distance^2, row, col)` tuple;
/// a ring at radius `R` cannot improve once `R^2` exceeds the best squared
/// distance (and cannot tie it row-major-earlier once `R^2` is larger).
fn nearest_free_cell(
    occupied: &[bool],
    width: usize,
    height: usize,
    row: usize,
    col: usize,
) -> Option<usize> {
    let (r0, c0) = (row as i64, col as i64);
    let max_radius = (width + height) as i64;
    let mut best: Option<(i64, i64, i64)> = None;
    for radius in 1..=max_radius {
        if let Some((d2, _, _)) = best {
            if radius * radius > d2 {
                break;
            }
        }
        let mut consider = |r: i64, c: i64| {
            if r < 0 || c < 0 || r >= height as i64 || c >= width as i64 {
                return;
            }
            if occupied[(r as usize) * width + c as usize] {
                return;
            }
            let d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0);
            let key = (d2, r, c);
            if best.is_none() || key < best.unwrap() {
                best = Some(key);
            }
        };
        for c in c0 - radius..=c0 + radius {
            consider(r0 - radius, c);
            consider(r0 + radius, c);
        }
        for r in r0 - radius + 1..=r0 + radius - 1 {
            consider(r, c0 - radius);
            consider(r, c0 + radius);
        }
    }
    best.map(|(_, r, c)| (r as usize) * width + c as usize)
}
