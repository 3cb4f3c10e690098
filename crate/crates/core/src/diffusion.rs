//! Error-diffusion engines.
//!
//! [`run_scheme`] walks the image in scan order and, at every pixel, feeds a
//! weighted sum of directionally filtered past state values back into the
//! one-bit quantizer:
//!
//! ```text
//! s_n = sum_e w_e (h^e *_d_e v)_n      (state outside the grid reads as 0)
//! q_n = sign(s_n + p_n)                (sign(0) = -1: ties go to black)
//! v_n = s_n + p_n - q_n
//! ```
//!
//! [`run_floyd_steinberg_direct`] is an independent straight-line
//! transcription of the classic Floyd–Steinberg recurrence, kept as a
//! reference the generic engine is checked against bit for bit.
//! [`run_sigma_delta_1d`] is the one-dimensional quantizer used by the
//! decay benchmark.

use crate::image::{BinaryImage, SignedImage};
use crate::scheme::{FeedbackFilter, SchemeSpec};
use std::fmt;

/// Pixel visiting order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanOrder {
    /// Every row left to right.
    Raster,
    /// Odd rows right to left, with the column offsets of the scheme
    /// mirrored so the error still flows toward unvisited pixels.
    Serpentine,
}

impl fmt::Display for ScanOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanOrder::Raster => write!(f, "raster"),
            ScanOrder::Serpentine => write!(f, "serpentine"),
        }
    }
}

impl std::str::FromStr for ScanOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raster" => Ok(ScanOrder::Raster),
            "serpentine" => Ok(ScanOrder::Serpentine),
            other => Err(format!("unknown scan order {other:?}")),
        }
    }
}

/// Output of a halftoning run: the binary image, the final state field,
/// and the largest state magnitude seen (the stability indicator for
/// higher-order schemes).
#[derive(Clone, Debug)]
pub struct HalftoneResult {
    pub q: BinaryImage,
    pub v_final: Vec<f64>,
    pub v_max_abs: f64,
    pub scheme: String,
    pub scan: ScanOrder,
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Classic Floyd–Steinberg, written out literally.
pub fn run_floyd_steinberg_direct(p: &SignedImage) -> HalftoneResult {
    let (width, height) = (p.width(), p.height());
    let mut v = vec![0.0f64; width * height];
    let mut q = vec![0i8; width * height];
    let mut v_max_abs = 0.0f64;

    let at = |v: &[f64], m: i64, n: i64| -> f64 {
        if m < 0 || n < 0 || m >= height as i64 || n >= width as i64 {
            0.0
        } else {
            v[m as usize * width + n as usize]
        }
    };

    for m in 0..height as i64 {
        for n in 0..width as i64 {
            let mut s = 5.0 / 16.0 * at(&v, m - 1, n);
            s += 7.0 / 16.0 * at(&v, m, n - 1);
            s += 1.0 / 16.0 * at(&v, m - 1, n - 1);
            s += 3.0 / 16.0 * at(&v, m - 1, n + 1);
            let arg = s + p.get(m as usize, n as usize);
            let qi = sign(arg);
            let vi = arg - qi;
            let idx = m as usize * width + n as usize;
            q[idx] = qi as i8;
            v[idx] = vi;
            if vi.abs() > v_max_abs {
                v_max_abs = vi.abs();
            }
        }
    }

    HalftoneResult {
        q: BinaryImage::from_signs_unchecked(width, height, q),
        v_final: v,
        v_max_abs,
        scheme: "floyd-steinberg-direct".to_string(),
        scan: ScanOrder::Raster,
    }
}

struct EntryF {
    di: i64,
    dj: i64,
    weight: f64,
    taps: Vec<f64>,
}

/// Run an arbitrary weighted sigma-delta scheme over a signed image.
pub fn run_scheme(p: &SignedImage, scheme: &SchemeSpec, scan: ScanOrder) -> HalftoneResult {
    let (width, height) = (p.width(), p.height());
    let entries: Vec<EntryF> = scheme
        .entries()
        .iter()
        .map(|e| EntryF {
            di: e.direction.di(),
            dj: e.direction.dj(),
            weight: *e.weight.numer() as f64 / *e.weight.denom() as f64,
            taps: e.filter.taps_f64(),
        })
        .collect();

    let mut v = vec![0.0f64; width * height];
    let mut q = vec![0i8; width * height];
    let mut v_max_abs = 0.0f64;

    let wi = width as i64;
    let hi = height as i64;

    for row in 0..height {
        let mirrored = scan == ScanOrder::Serpentine && row % 2 == 1;
        let mut step = |row: usize, col: usize| {
            let (r, c) = (row as i64, col as i64);
            let mut s = 0.0;
            for e in &entries {
                let dj = if mirrored { -e.dj } else { e.dj };
                let mut conv = 0.0;
                for (k, tap) in e.taps.iter().enumerate() {
                    let steps = (k + 1) as i64;
                    let rr = r - steps * e.di;
                    let cc = c - steps * dj;
                    let past = if rr < 0 || cc < 0 || rr >= hi || cc >= wi {
                        0.0
                    } else {
                        v[rr as usize * width + cc as usize]
                    };
                    conv += tap * past;
                }
                s += e.weight * conv;
            }
            let arg = s + p.get(row, col);
            let qi = sign(arg);
            let vi = arg - qi;
            let idx = row * width + col;
            q[idx] = qi as i8;
            v[idx] = vi;
            if vi.abs() > v_max_abs {
                v_max_abs = vi.abs();
            }
        };
        if mirrored {
            for col in (0..width).rev() {
                step(row, col);
            }
        } else {
            for col in 0..width {
                step(row, col);
            }
        }
    }

    HalftoneResult {
        q: BinaryImage::from_signs_unchecked(width, height, q),
        v_final: v,
        v_max_abs,
        scheme: scheme.name().to_string(),
        scan,
    }
}

/// One-dimensional sigma-delta run over a sample sequence.
#[derive(Clone, Debug)]
pub struct SigmaDeltaRun {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    pub v_max_abs: f64,
}

/// Quantize `samples` with the feedback filter `h`; state before the first
/// sample reads as zero.
pub fn run_sigma_delta_1d(samples: &[f64], filter: &FeedbackFilter) -> SigmaDeltaRun {
    let taps = filter.taps_f64();
    let mut v = vec![0.0f64; samples.len()];
    let mut q = Vec::with_capacity(samples.len());
    let mut v_max_abs = 0.0f64;
    for (n, &p) in samples.iter().enumerate() {
        let mut s = 0.0;
        for (k, tap) in taps.iter().enumerate() {
            let idx = n as i64 - (k + 1) as i64;
            let past = if idx < 0 { 0.0 } else { v[idx as usize] };
            s += tap * past;
        }
        let arg = s + p;
        let qi = sign(arg);
        let vi = arg - qi;
        q.push(qi);
        v[n] = vi;
        if vi.abs() > v_max_abs {
            v_max_abs = vi.abs();
        }
    }
    SigmaDeltaRun { q, v, v_max_abs }
}

/// Shrink amplitudes toward zero: `p <- (1 - margin) * p`.
///
/// Higher-order schemes misbehave on saturated regions; a few percent of
/// headroom keeps the state bounded while changing 8-bit gray levels by at
/// most a handful of counts.
pub fn rescale(p: &SignedImage, margin: f64) -> SignedImage {
    assert!(
        margin > 0.0 && margin < 1.0,
        "rescale margin must lie in (0, 1)"
    );
    let factor = 1.0 - margin;
    let values = p.values().iter().map(|&x| factor * x).collect();
    SignedImage::new(p.width(), p.height(), values).expect("shrinking preserves the range")
}
