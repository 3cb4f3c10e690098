//! Halftoning toolkit.
//!
//! Two families of halftoning algorithms operating on grayscale images,
//! together with the quality measures used to compare them:
//!
//! * [`attraction`] — analog halftoning on continuous coordinates: dots are
//!   charged particles attracted by dark pixels and repelled by each other,
//!   evolved by force iteration or subgradient descent and finally snapped
//!   to the pixel grid.
//! * [`diffusion`] — digital halftoning on the pixel grid: a generic
//!   error-diffusion engine expressed as weighted sigma-delta quantization
//!   over direction sets, weight matrices and per-direction feedback
//!   filters. Classic schemes (Floyd–Steinberg, Shiau–Fan, Jarvis–Judice–
//!   Ninke) and second-order filtered variants are built in; see
//!   [`scheme`].
//! * [`rkhs`] — kernel energies, worst-case quadrature error and
//!   discrepancies that quantify how well a dot configuration represents
//!   an image measure.
//! * [`signal`], [`reconstruct`], [`decay`] — bandlimited test signals,
//!   low-pass reconstruction, and the benchmark measuring how the
//!   reconstruction error of an order-r quantizer decays with the
//!   oversampling rate.
//!
//! Shared image containers and PGM I/O live in [`image`] and [`pgm`].

pub mod attraction;
pub mod decay;
pub mod diffusion;
pub mod image;
pub mod pgm;
pub mod point;
pub mod reconstruct;
pub mod rkhs;
pub mod scheme;
pub mod signal;
pub mod util;

pub use image::{BinaryImage, GrayImage, GridIndex, SignedImage};
pub use point::Point;
pub use scheme::{
    builtin, builtin_schemes, expand_scheme, verify_order, Direction, ExtendedMatrix,
    FeedbackFilter, Rational, SchemeEntry, SchemeSpec,
};

pub use decay::DecayReport;
pub use diffusion::{HalftoneResult, ScanOrder};
pub use reconstruct::LowPassKernel;
