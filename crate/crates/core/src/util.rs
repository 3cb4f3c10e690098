//! Formatting helpers shared by the CSV/JSON emitters.

/// Format `x` with exactly `sig` significant digits in scientific notation.
///
/// Used wherever an output contract pins a digit count (dot CSV files use 9,
/// metric JSON uses 12), so repeated runs are byte-identical.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    format!("{:.*e}", sig - 1, x)
}
