//! PGM (portable graymap) reading and writing.
//!
//! Reads P2 (ASCII) and P5 (binary) with maxval up to 65535; `#` comments in
//! the header are accepted. Writing always produces P5 with maxval 255, no
//! comments, single whitespace separators, so outputs are byte-reproducible
//! and binary images round-trip bit-exactly.

use crate::image::{BinaryImage, GrayImage};
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid PGM at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },
    #[error(transparent)]
    Image(#[from] crate::image::ImageError),
}

fn parse_err<T>(offset: usize, reason: impl Into<String>) -> Result<T, PgmError> {
    Err(PgmError::Parse {
        offset,
        reason: reason.into(),
    })
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_uint(&mut self, what: &str) -> Result<u32, PgmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            value = value * 10 + u64::from(self.data[self.pos] - b'0');
            if value > u64::from(u32::MAX) {
                return parse_err(start, format!("{what} overflows"));
            }
            self.pos += 1;
        }
        if self.pos == start {
            return parse_err(start, format!("expected {what}"));
        }
        Ok(value as u32)
    }
}

/// Decode a PGM file from memory.
pub fn load_pgm_bytes(data: &[u8]) -> Result<GrayImage, PgmError> {
    if data.len() < 2 {
        return parse_err(0, "file too short for magic number");
    }
    let binary = match &data[..2] {
        b"P2" => false,
        b"P5" => true,
        _ => return parse_err(0, "magic number is not P2 or P5"),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.read_uint("width")? as usize;
    let height = cur.read_uint("height")? as usize;
    let maxval_pos = {
        cur.skip_separators();
        cur.pos
    };
    let maxval = cur.read_uint("maxval")?;
    if maxval == 0 {
        return parse_err(maxval_pos, "maxval is 0");
    }
    if maxval > 65535 {
        return parse_err(maxval_pos, format!("maxval {maxval} exceeds 65535"));
    }
    if width == 0 || height == 0 {
        return parse_err(2, format!("degenerate dimensions {width}x{height}"));
    }

    let count = width * height;
    let mut raw = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the payload.
        if cur.pos >= data.len() || !data[cur.pos].is_ascii_whitespace() {
            return parse_err(cur.pos, "missing whitespace before P5 payload");
        }
        cur.pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        if data.len() - cur.pos < need {
            return parse_err(
                data.len(),
                format!(
                    "truncated payload: need {need} bytes, have {}",
                    data.len() - cur.pos
                ),
            );
        }
        for i in 0..count {
            let sample = if wide {
                let hi = data[cur.pos + 2 * i] as u32;
                let lo = data[cur.pos + 2 * i + 1] as u32;
                (hi << 8) | lo
            } else {
                data[cur.pos + i] as u32
            };
            if sample > maxval {
                return parse_err(
                    cur.pos + i * if wide { 2 } else { 1 },
                    format!("sample {sample} exceeds maxval {maxval}"),
                );
            }
            raw.push(sample);
        }
    } else {
        for _ in 0..count {
            cur.skip_separators();
            let at = cur.pos;
            if at >= data.len() {
                return parse_err(data.len(), "truncated payload: fewer samples than pixels");
            }
            let sample = cur.read_uint("sample")?;
            if sample > maxval {
                return parse_err(at, format!("sample {sample} exceeds maxval {maxval}"));
            }
            raw.push(sample);
        }
    }

    let scale = f64::from(maxval);
    let values = raw.into_iter().map(|s| f64::from(s) / scale).collect();
    Ok(GrayImage::new(width, height, values)?)
}

/// Load a PGM file, mapping samples to `[0, 1]` by division by maxval.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, PgmError> {
    let data = fs::read(path)?;
    load_pgm_bytes(&data)
}

fn header(width: usize, height: usize) -> Vec<u8> {
    format!("P5\n{width} {height}\n255\n").into_bytes()
}

/// Encode as P5 with maxval 255; gray `u` is written as `round(255 * u)`.
pub fn gray_pgm_bytes(image: &GrayImage) -> Vec<u8> {
    let mut out = header(image.width(), image.height());
    out.extend(image.values().iter().map(|&u| (255.0 * u).round() as u8));
    out
}

/// Encode as P5 with maxval 255; -1 maps to 0 and +1 to 255.
pub fn binary_pgm_bytes(image: &BinaryImage) -> Vec<u8> {
    let mut out = header(image.width(), image.height());
    out.extend(image.values().iter().map(|&q| if q == 1 { 255u8 } else { 0 }));
    out
}

pub fn save_gray_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<(), PgmError> {
    fs::write(path, gray_pgm_bytes(image))?;
    Ok(())
}

pub fn save_binary_pgm(image: &BinaryImage, path: impl AsRef<Path>) -> Result<(), PgmError> {
    fs::write(path, binary_pgm_bytes(image))?;
    Ok(())
}
