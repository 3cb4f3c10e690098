//! Error-diffusion scheme descriptions in exact rational arithmetic.
//!
//! A scheme is a set of causal directions, a weight per direction (weights
//! sum to 1), and a feedback filter per direction. Filters of order `r`
//! factor as `1 - h(z) = (1 - z)^r g(z)` with a causal polynomial `g`;
//! [`verify_order`] computes that certificate. [`expand_scheme`] flattens a
//! scheme into the extended coefficient grid of the linear recurrence it
//! induces, which is what the engine in [`crate::diffusion`] evaluates.

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Exact scheme coefficient.
pub type Rational = Ratio<i64>;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("direction ({di},{dj}) is not causal for a line-by-line scan")]
    NonCausalDirection { di: i64, dj: i64 },
    #[error("scheme weights sum to {sum}, expected 1")]
    WeightSum { sum: Rational },
    #[error("scheme has no entries")]
    Empty,
    #[error("feedback filter has no taps")]
    EmptyFilter,
    #[error("filter on direction ({di},{dj}) does not certify order {order}")]
    OrderNotCertified { di: i64, dj: i64, order: u32 },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("cannot parse rational {text:?}: {reason}")]
    BadRational { text: String, reason: String },
    #[error("scheme JSON: {0}")]
    Json(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Offset to an already-quantized pixel: `di` rows up the scan, `dj` columns.
///
/// Causality for a line-by-line scan requires `di >= 1`, or `di == 0` with
/// `dj >= 1` (same row, already visited).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Direction {
    di: i64,
    dj: i64,
}

impl Direction {
    pub fn new(di: i64, dj: i64) -> Result<Self, SchemeError> {
        if di >= 1 || (di == 0 && dj >= 1) {
            Ok(Direction { di, dj })
        } else {
            Err(SchemeError::NonCausalDirection { di, dj })
        }
    }

    pub fn di(self) -> i64 {
        self.di
    }

    pub fn dj(self) -> i64 {
        self.dj
    }
}

/// Causal feedback filter `h`, stored as taps `h_1 .. h_L` (`h_0` is 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedbackFilter {
    taps: Vec<Rational>,
}

impl FeedbackFilter {
    pub fn new(taps: Vec<Rational>) -> Result<Self, SchemeError> {
        if taps.is_empty() {
            return Err(SchemeError::EmptyFilter);
        }
        Ok(FeedbackFilter { taps })
    }

    /// The plain first-order filter `h = [1]`.
    pub fn first_order() -> Self {
        FeedbackFilter {
            taps: vec![Rational::one()],
        }
    }

    /// Three-tap second-order filter `(3/2, 0, -1/2)`.
    pub fn h2() -> Self {
        FeedbackFilter {
            taps: vec![
                Rational::new(3, 2),
                Rational::zero(),
                Rational::new(-1, 2),
            ],
        }
    }

    /// Four-tap second-order filter `(4/3, 0, 0, -1/3)`.
    pub fn h3() -> Self {
        FeedbackFilter {
            taps: vec![
                Rational::new(4, 3),
                Rational::zero(),
                Rational::zero(),
                Rational::new(-1, 3),
            ],
        }
    }

    pub fn taps(&self) -> &[Rational] {
        &self.taps
    }

    pub fn taps_f64(&self) -> Vec<f64> {
        self.taps
            .iter()
            .map(|t| *t.numer() as f64 / *t.denom() as f64)
            .collect()
    }
}

/// Remainder-free polynomial division, coefficients ascending in degree.
/// Returns the quotient only when the divisor divides exactly.
fn poly_div_exact(num: &[Rational], den: &[Rational]) -> Option<Vec<Rational>> {
    let dd = den.iter().rposition(|c| !c.is_zero())?;
    let mut rem: Vec<Rational> = num.to_vec();
    let nd = match rem.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Some(vec![Rational::zero()]),
    };
    if nd < dd {
        return None;
    }
    let mut quot = vec![Rational::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd] / den[dd];
        quot[k] = c;
        for j in 0..=dd {
            rem[k + j] -= c * den[j];
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

/// Coefficients of `(1 - z)^r`, ascending.
fn one_minus_z_pow(r: u32) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for _ in 0..r {
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += *c;
            next[i + 1] -= *c;
        }
        poly = next;
    }
    poly
}

/// Check whether `1 - h(z)` is divisible by `(1 - z)^r`.
///
/// Returns the quotient `g` (ascending coefficients, `g_0` first) when the
/// filter certifies order `r`, `None` otherwise.
pub fn verify_order(filter: &FeedbackFilter, r: u32) -> Option<Vec<Rational>> {
    if r == 0 {
        return None;
    }
    // 1 - sum_n h_n z^n
    let mut poly = vec![Rational::one()];
    poly.extend(filter.taps.iter().map(|t| -*t));
    let mut g = poly_div_exact(&poly, &one_minus_z_pow(r))?;
    while g.len() > 1 && g.last().is_some_and(|c| c.is_zero()) {
        g.pop();
    }
    Some(g)
}

/// One direction of a scheme: where the error flows, with what weight,
/// through which feedback filter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeEntry {
    pub direction: Direction,
    pub weight: Rational,
    pub filter: FeedbackFilter,
}

/// A complete weighted sigma-delta error-diffusion scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    name: String,
    entries: Vec<SchemeEntry>,
    order: u32,
}

impl SchemeSpec {
    /// Validates the weight-sum constraint, direction causality (already
    /// guaranteed by [`Direction`]), and the declared order of every filter.
    pub fn new(
        name: impl Into<String>,
        entries: Vec<SchemeEntry>,
        order: u32,
    ) -> Result<Self, SchemeError> {
        if entries.is_empty() {
            return Err(SchemeError::Empty);
        }
        if order == 0 {
            return Err(SchemeError::ZeroOrder);
        }
        let sum: Rational = entries.iter().map(|e| e.weight).sum();
        if !sum.is_one() {
            return Err(SchemeError::WeightSum { sum });
        }
        for entry in &entries {
            if verify_order(&entry.filter, order).is_none() {
                return Err(SchemeError::OrderNotCertified {
                    di: entry.direction.di(),
                    dj: entry.direction.dj(),
                    order,
                });
            }
        }
        Ok(SchemeSpec {
            name: name.into(),
            entries,
            order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[SchemeEntry] {
        &self.entries
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn from_json_str(text: &str) -> Result<Self, SchemeError> {
        let dto: SchemeJson =
            serde_json::from_str(text).map_err(|e| SchemeError::Json(e.to_string()))?;
        dto.build()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, SchemeError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

#[derive(Deserialize)]
struct SchemeJson {
    name: String,
    order: u32,
    entries: Vec<SchemeEntryJson>,
}

#[derive(Deserialize)]
struct SchemeEntryJson {
    di: i64,
    dj: i64,
    weight: String,
    taps: Vec<String>,
}

impl SchemeJson {
    fn build(self) -> Result<SchemeSpec, SchemeError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in self.entries {
            let taps = e
                .taps
                .iter()
                .map(|t| parse_rational(t))
                .collect::<Result<Vec<_>, _>>()?;
            entries.push(SchemeEntry {
                direction: Direction::new(e.di, e.dj)?,
                weight: parse_rational(&e.weight)?,
                filter: FeedbackFilter::new(taps)?,
            });
        }
        SchemeSpec::new(self.name, entries, self.order)
    }
}

/// Parse `"num/den"` or a plain integer into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, SchemeError> {
    let bad = |reason: &str| SchemeError::BadRational {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let mut parts = text.trim().splitn(2, '/');
    let numer: i64 = parts
        .next()
        .unwrap_or("")
        .trim()
        .parse()
        .map_err(|_| bad("numerator is not an integer"))?;
    let denom: i64 = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad("denominator is not an integer"))?,
        None => 1,
    };
    if denom == 0 {
        return Err(bad("denominator is zero"));
    }
    Ok(Rational::new(numer, denom))
}

fn w16(n: i64) -> Rational {
    Rational::new(n, 16)
}

fn entry(di: i64, dj: i64, weight: Rational, filter: FeedbackFilter) -> SchemeEntry {
    SchemeEntry {
        direction: Direction::new(di, dj).expect("builtin direction"),
        weight,
        filter,
    }
}

/// Classic Floyd–Steinberg weights. Entries are listed in the summation
/// order of the textbook recurrence (up, left, up-left, up-right) so the
/// generic engine reproduces the direct implementation bit for bit.
fn floyd_steinberg_entries(filter: fn() -> FeedbackFilter) -> Vec<SchemeEntry> {
    vec![
        entry(1, 0, w16(5), filter()),
        entry(0, 1, w16(7), filter()),
        entry(1, 1, w16(1), filter()),
        entry(1, -1, w16(3), filter()),
    ]
}

/// The built-in scheme catalog.
///
/// * `fs1` — Floyd–Steinberg, first order.
/// * `shiau-fan` — Shiau–Fan variant with a long left reach, first order.
/// * `jjn` — the 12-element Jarvis–Judice–Ninke matrix, first order.
/// * `a23`, `a33` — two-direction averages with second-order filters
///   (`h2`/`h3` and `h3`/`h3` respectively).
/// * `fs2-33` — Floyd–Steinberg weights with `h3` on all four directions.
pub fn builtin_schemes() -> Vec<SchemeSpec> {
    let first = FeedbackFilter::first_order;
    let half = Rational::new(1, 2);
    let w48 = |n: i64| Rational::new(n, 48);
    vec![
        SchemeSpec::new("fs1", floyd_steinberg_entries(first), 1).expect("fs1"),
        SchemeSpec::new(
            "shiau-fan",
            vec![
                entry(0, 1, w16(8), first()),
                entry(1, 0, w16(4), first()),
                entry(1, -1, w16(2), first()),
                entry(1, -2, w16(1), first()),
                entry(1, -3, w16(1), first()),
            ],
            1,
        )
        .expect("shiau-fan"),
        SchemeSpec::new(
            "jjn",
            vec![
                entry(0, 1, w48(7), first()),
                entry(0, 2, w48(5), first()),
                entry(1, -2, w48(3), first()),
                entry(1, -1, w48(5), first()),
                entry(1, 0, w48(7), first()),
                entry(1, 1, w48(5), first()),
                entry(1, 2, w48(3), first()),
                entry(2, -2, w48(1), first()),
                entry(2, -1, w48(3), first()),
                entry(2, 0, w48(5), first()),
                entry(2, 1, w48(3), first()),
                entry(2, 2, w48(1), first()),
            ],
            1,
        )
        .expect("jjn"),
        SchemeSpec::new(
            "a23",
            vec![
                entry(0, 1, half, FeedbackFilter::h2()),
                entry(1, 0, half, FeedbackFilter::h3()),
            ],
            2,
        )
        .expect("a23"),
        SchemeSpec::new(
            "a33",
            vec![
                entry(0, 1, half, FeedbackFilter::h3()),
                entry(1, 0, half, FeedbackFilter::h3()),
            ],
            2,
        )
        .expect("a33"),
        SchemeSpec::new("fs2-33", floyd_steinberg_entries(FeedbackFilter::h3), 2).expect("fs2-33"),
    ]
}

/// Look up a built-in scheme by its CLI-facing name.
pub fn builtin(name: &str) -> Option<SchemeSpec> {
    builtin_schemes().into_iter().find(|s| s.name() == name)
}

pub fn builtin_names() -> Vec<String> {
    builtin_schemes()
        .iter()
        .map(|s| s.name().to_string())
        .collect()
}

/// One cell of an extended matrix. `value` is the canonical rational;
/// `display_den` remembers the unreduced product denominator
/// (weight denominator times tap denominator) so the grid prints the way
/// weight matrices are conventionally written, e.g. `-28/48` rather than
/// `-7/12`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendedCell {
    pub value: Rational,
    display_den: i64,
}

impl ExtendedCell {
    fn display_string(&self) -> String {
        if self.value.is_zero() {
            return "0".to_string();
        }
        if self.value.is_integer() && self.display_den == 1 {
            return self.value.numer().to_string();
        }
        let numer = self.value * Rational::from_integer(self.display_den);
        debug_assert!(numer.is_integer());
        format!("{}/{}", numer.numer(), self.display_den)
    }
}

/// The coefficient grid of `v_n - sum_e w_e (h^e *_d v)_n` as a map from
/// pixel offsets to exact coefficients: `+1` at the origin and
/// `-w_e h^e_k` at offset `k * d_e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedMatrix {
    cells: BTreeMap<(i64, i64), ExtendedCell>,
}

fn lcm(a: i64, b: i64) -> i64 {
    let g = num_integer_gcd(a.abs(), b.abs());
    (a / g).abs() * b.abs()
}

fn num_integer_gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl ExtendedMatrix {
    /// Coefficient at a given `(di, dj)` offset; zero when absent.
    pub fn value_at(&self, di: i64, dj: i64) -> Rational {
        self.cells
            .get(&(di, dj))
            .map(|c| c.value)
            .unwrap_or_else(Rational::zero)
    }

    /// All nonzero cells in row-major offset order.
    pub fn cells(&self) -> impl Iterator<Item = (&(i64, i64), &ExtendedCell)> {
        self.cells.iter()
    }

    /// Sum of every coefficient including the `+1` at the origin.
    /// Zero exactly for any scheme whose filters sum to 1 (order >= 1).
    pub fn coefficient_total(&self) -> Rational {
        self.cells.values().map(|c| c.value).sum()
    }

    /// Row range `0..=max_di` and column range `min_dj..=max_dj`.
    pub fn bounds(&self) -> (i64, i64, i64) {
        let mut max_di = 0;
        let mut min_dj = 0;
        let mut max_dj = 0;
        for &(di, dj) in self.cells.keys() {
            max_di = max_di.max(di);
            min_dj = min_dj.min(dj);
            max_dj = max_dj.max(dj);
        }
        (max_di, min_dj, max_dj)
    }
}

impl fmt::Display for ExtendedMatrix {
    /// Renders the grid row-major with the origin cell bracketed, keeping
    /// the unreduced product denominators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (max_di, min_dj, max_dj) = self.bounds();
        for di in 0..=max_di {
            let mut row = Vec::new();
            for dj in min_dj..=max_dj {
                let text = match self.cells.get(&(di, dj)) {
                    Some(cell) => cell.display_string(),
                    None => "0".to_string(),
                };
                if di == 0 && dj == 0 {
                    row.push(format!("[{text}]"));
                } else {
                    row.push(text);
                }
            }
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Flatten a scheme into its extended coefficient grid.
pub fn expand_scheme(scheme: &SchemeSpec) -> ExtendedMatrix {
    let mut cells: BTreeMap<(i64, i64), ExtendedCell> = BTreeMap::new();
    cells.insert(
        (0, 0),
        ExtendedCell {
            value: Rational::one(),
            display_den: 1,
        },
    );
    for entry in scheme.entries() {
        let den_w = *entry.weight.denom();
        for (k, tap) in entry.filter.taps().iter().enumerate() {
            if tap.is_zero() {
                continue;
            }
            let steps = (k + 1) as i64;
            let offset = (
                steps * entry.direction.di(),
                steps * entry.direction.dj(),
            );
            let value = -entry.weight * *tap;
            let den = den_w * *tap.denom();
            cells
                .entry(offset)
                .and_modify(|cell| {
                    cell.value += value;
                    cell.display_den = lcm(cell.display_den, den);
                })
                .or_insert(ExtendedCell {
                    value,
                    display_den: den,
                });
        }
    }
    // A cancelled cell still prints as 0.
    cells.retain(|k, c| *k == (0, 0) || !c.value.is_zero());
    ExtendedMatrix { cells }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Test-side oracle: multiply the certificate back and compare against
    /// 1 - h(z), independently of the division routine.
    fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j] + *x * *y;
            }
        }
        out
    }

    fn assert_certificate(filter: &FeedbackFilter, r: u32, expected_g: &[Rational]) {
        let g = verify_order(filter, r).expect("order should certify");
        assert_eq!(g, expected_g);
        let mut lhs = vec![Rational::one()];
        lhs.extend(filter.taps().iter().map(|t| -*t));
        let mut rhs = poly_mul(&one_minus_z_pow(r), &g);
        while rhs.len() < lhs.len() {
            rhs.push(Rational::zero());
        }
        while lhs.len() < rhs.len() {
            lhs.push(Rational::zero());
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn first_order_certificate() {
        assert_certificate(&FeedbackFilter::first_order(), 1, &[rat(1, 1)]);
    }

    #[test]
    fn h2_is_second_order_with_known_quotient() {
        assert_certificate(&FeedbackFilter::h2(), 2, &[rat(1, 1), rat(1, 2)]);
    }

    #[test]
    fn h3_is_second_order_with_known_quotient() {
        assert_certificate(&FeedbackFilter::h3(), 2, &[rat(1, 1), rat(2, 3), rat(1, 3)]);
    }

    #[test]
    fn order_overclaim_is_rejected() {
        assert!(verify_order(&FeedbackFilter::first_order(), 2).is_none());
        assert!(verify_order(&FeedbackFilter::h2(), 3).is_none());
        // A filter that does not even sum to 1 certifies nothing.
        let f = FeedbackFilter::new(vec![rat(1, 2)]).unwrap();
        assert!(verify_order(&f, 1).is_none());
    }

    #[test]
    fn builtin_catalog_is_valid() {
        let all = builtin_schemes();
        let names: Vec<_> = all.iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names, ["fs1", "shiau-fan", "jjn", "a23", "a33", "fs2-33"]);
        for scheme in &all {
            let sum: Rational = scheme.entries().iter().map(|e| e.weight).sum();
            assert!(sum.is_one(), "{} weights sum to {}", scheme.name(), sum);
        }
        assert_eq!(builtin("jjn").unwrap().entries().len(), 12);
        assert!(builtin("nosuch").is_none());
    }

    #[test]
    fn non_causal_directions_rejected() {
        assert!(Direction::new(0, 0).is_err());
        assert!(Direction::new(0, -1).is_err());
        assert!(Direction::new(-1, 3).is_err());
        assert!(Direction::new(0, 1).is_ok());
        assert!(Direction::new(1, -5).is_ok());
    }

    #[test]
    fn scheme_validation_rejects_bad_weight_sum() {
        let entries = vec![entry(0, 1, rat(1, 2), FeedbackFilter::first_order())];
        match SchemeSpec::new("half", entries, 1) {
            Err(SchemeError::WeightSum { sum }) => assert_eq!(sum, rat(1, 2)),
            other => panic!("expected weight-sum error, got {other:?}"),
        }
    }

    #[test]
    fn scheme_validation_rejects_unsupported_order() {
        let entries = vec![entry(0, 1, rat(1, 1), FeedbackFilter::first_order())];
        assert!(matches!(
            SchemeSpec::new("x", entries, 2),
            Err(SchemeError::OrderNotCertified { .. })
        ));
    }

    #[test]
    fn first_order_expansion_mirrors_weights() {
        let fs1 = builtin("fs1").unwrap();
        let ext = expand_scheme(&fs1);
        assert_eq!(ext.value_at(0, 0), rat(1, 1));
        assert_eq!(ext.value_at(0, 1), rat(-7, 16));
        assert_eq!(ext.value_at(1, -1), rat(-3, 16));
        assert_eq!(ext.value_at(1, 0), rat(-5, 16));
        assert_eq!(ext.value_at(1, 1), rat(-1, 16));
        assert_eq!(ext.coefficient_total(), Rational::zero());
    }

    #[test]
    fn a23_expansion_matches_printed_matrix() {
        let ext = expand_scheme(&builtin("a23").unwrap());
        assert_eq!(ext.value_at(0, 1), rat(-3, 4));
        assert_eq!(ext.value_at(0, 3), rat(1, 4));
        assert_eq!(ext.value_at(1, 0), rat(-4, 6));
        assert_eq!(ext.value_at(4, 0), rat(1, 6));
        assert_eq!(ext.cells().count(), 5);
        let rendered = format!("{ext}");
        assert!(rendered.contains("-3/4"));
        assert!(rendered.contains("1/4"));
        assert!(rendered.contains("-4/6"));
        assert!(rendered.contains("[1]"));
    }

    #[test]
    fn fs2_33_expansion_keeps_product_denominators() {
        let ext = expand_scheme(&builtin("fs2-33").unwrap());
        let rendered = format!("{ext}");
        for needle in [
            "-28/48", "7/48", "-12/48", "-20/48", "-4/48", "3/48", "5/48", "1/48",
        ] {
            assert!(rendered.contains(needle), "missing {needle}:\n{rendered}");
        }
    }

    #[test]
    fn coefficient_total_vanishes_for_all_builtins() {
        for scheme in builtin_schemes() {
            assert_eq!(
                expand_scheme(&scheme).coefficient_total(),
                Rational::zero(),
                "{}",
                scheme.name()
            );
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "name": "custom",
            "order": 2,
            "entries": [
                {"di": 0, "dj": 1, "weight": "1/2", "taps": ["3/2", "0", "-1/2"]},
                {"di": 1, "dj": 0, "weight": "1/2", "taps": ["4/3", "0", "0", "-1/3"]}
            ]
        }"#;
        let scheme = SchemeSpec::from_json_str(text).unwrap();
        assert_eq!(scheme.name(), "custom");
        assert_eq!(scheme.order(), 2);
        assert_eq!(expand_scheme(&scheme), expand_scheme(&builtin("a23").unwrap()));
    }

    #[test]
    fn json_bad_inputs() {
        assert!(SchemeSpec::from_json_str("{").is_err());
        let bad_weight = r#"{"name":"x","order":1,"entries":[{"di":0,"dj":1,"weight":"1/0","taps":["1"]}]}"#;
        assert!(matches!(
            SchemeSpec::from_json_str(bad_weight),
            Err(SchemeError::BadRational { .. })
        ));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("a/b").is_err());
    }

    mod properties {
        use super::super::*;
        use proptest::prelude::*;

        // random first-order schemes: positive integer numerators over
        // their own sum, one entry per distinct causal direction
        fn arb_scheme() -> impl Strategy<Value = SchemeSpec> {
            proptest::collection::vec((0i64..3, -3i64..4, 1i64..9), 1..6).prop_filter_map(
                "needs one causal direction",
                |raw| {
                    let mut entries: Vec<(i64, i64, i64)> = Vec::new();
                    for (di, dj, num) in raw {
                        let causal = di >= 1 || (di == 0 && dj >= 1);
                        if causal && !entries.iter().any(|e| (e.0, e.1) == (di, dj)) {
                            entries.push((di, dj, num));
                        }
                    }
                    if entries.is_empty() {
                        return None;
                    }
                    let total: i64 = entries.iter().map(|e| e.2).sum();
                    let entries = entries
                        .into_iter()
                        .map(|(di, dj, num)| SchemeEntry {
                            direction: Direction::new(di, dj).unwrap(),
                            weight: Rational::new(num, total),
                            filter: FeedbackFilter::first_order(),
                        })
                        .collect();
                    Some(SchemeSpec::new("random", entries, 1).unwrap())
                },
            )
        }

        proptest! {
            // First-order expansion is +1 at the origin and -w at each
            // direction, and every expansion's coefficients cancel.
            #[test]
            fn random_first_order_expansions(scheme in arb_scheme()) {
                let ext = expand_scheme(&scheme);
                prop_assert_eq!(ext.value_at(0, 0), Rational::one());
                for entry in scheme.entries() {
                    prop_assert_eq!(
                        ext.value_at(entry.direction.di(), entry.direction.dj()),
                        -entry.weight
                    );
                }
                prop_assert_eq!(ext.coefficient_total(), Rational::zero());
            }
        }
    }
}
