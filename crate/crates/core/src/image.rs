//! Image containers shared by every algorithm in the crate.
//!
//! Three value conventions coexist:
//!
//! * [`GrayImage`] — gray levels `u` in `[0, 1]`, 0 black, 1 white;
//! * [`SignedImage`] — levels `p = 2u - 1` in `[-1, 1]`, the input range of
//!   the error-diffusion quantizers;
//! * [`BinaryImage`] — values in `{-1, +1}`, +1 white, the quantizer output.
//!
//! Storage is row-major with the origin at the top-left, row index first.
//! All three types are immutable after construction.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be nonzero (got {width}x{height})")]
    ZeroDimension { width: usize, height: usize },
    #[error("value buffer has length {actual}, expected {expected}")]
    BadLength { expected: usize, actual: usize },
    #[error("value {value} at index {index} outside {range}")]
    OutOfRange {
        index: usize,
        value: f64,
        range: &'static str,
    },
    #[error("value {value} at index {index} is not -1 or +1")]
    NotBinary { index: usize, value: f64 },
}

/// Pixel address: row first, then column, both zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridIndex {
    pub row: usize,
    pub col: usize,
}

impl GridIndex {
    pub fn new(row: usize, col: usize) -> Self {
        GridIndex { row, col }
    }

    pub fn in_bounds(self, width: usize, height: usize) -> bool {
        self.row < height && self.col < width
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroDimension { width, height });
    }
    let expected = width * height;
    if len != expected {
        return Err(ImageError::BadLength {
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// Grayscale image with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, ImageError> {
        check_dims(width, height, values.len())?;
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ImageError::OutOfRange {
                    index,
                    value,
                    range: "[0, 1]",
                });
            }
        }
        Ok(GrayImage {
            width,
            height,
            values,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
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

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col]
    }

    /// Rescale to the centered interval: `p = 2u - 1`.
    pub fn to_signed(&self) -> SignedImage {
        let values = self.values.iter().map(|&u| 2.0 * u - 1.0).collect();
        SignedImage {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

/// Image with values in the centered interval `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SignedImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, ImageError> {
        check_dims(width, height, values.len())?;
        for (index, &value) in values.iter().enumerate() {
            if !(-1.0..=1.0).contains(&value) {
                return Err(ImageError::OutOfRange {
                    index,
                    value,
                    range: "[-1, 1]",
                });
            }
        }
        Ok(SignedImage {
            width,
            height,
            values,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
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

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col]
    }

    /// Inverse of [`GrayImage::to_signed`]: `u = (p + 1) / 2`.
    pub fn to_gray(&self) -> GrayImage {
        let values = self.values.iter().map(|&p| (p + 1.0) / 2.0).collect();
        GrayImage {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

/// Halftoned image with values in `{-1, +1}`; +1 is white.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    values: Vec<i8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, values: Vec<i8>) -> Result<Self, ImageError> {
        check_dims(width, height, values.len())?;
        for (index, &value) in values.iter().enumerate() {
            if value != -1 && value != 1 {
                return Err(ImageError::NotBinary {
                    index,
                    value: value as f64,
                });
            }
        }
        Ok(BinaryImage {
            width,
            height,
            values,
        })
    }

    /// All-white image.
    pub fn white(width: usize, height: usize) -> Result<Self, ImageError> {
        Self::new(width, height, vec![1; width * height])
    }

    /// Reinterpret a gray image whose values are exactly 0 or 1.
    pub fn try_from_gray(image: &GrayImage) -> Result<Self, ImageError> {
        let mut values = Vec::with_capacity(image.values.len());
        for (index, &u) in image.values.iter().enumerate() {
            if u == 0.0 {
                values.push(-1);
            } else if u == 1.0 {
                values.push(1);
            } else {
                return Err(ImageError::NotBinary { index, value: u });
            }
        }
        Self::new(image.width, image.height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col]
    }

    pub fn count_black(&self) -> usize {
        self.values.iter().filter(|&&q| q == -1).count()
    }

    pub fn to_signed(&self) -> SignedImage {
        SignedImage {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&q| q as f64).collect(),
        }
    }

    pub(crate) fn from_signs_unchecked(width: usize, height: usize, values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|&q| q == -1 || q == 1));
        BinaryImage {
            width,
            height,
            values,
        }
    }
}
