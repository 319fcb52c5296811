//! Plain-text number formatting and two-column plot series.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Significant digits used for decimal output.
pub const DECIMAL_DIGITS: usize = 12;

/// Formats `x` with `sig` significant digits, dropping trailing zeros.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    // Round first so that e.g. 9.9999999999996 picks the right exponent.
    let rounded: f64 = format!("{:.*e}", sig - 1, x).parse().unwrap_or(x);
    let exponent = rounded.abs().log10().floor() as i64;
    if !(-5..=15).contains(&exponent) {
        return trim_exponent(&format!("{:.*e}", sig - 1, x));
    }
    let decimals = (sig as i64 - 1 - exponent).max(0) as usize;
    trim_zeros(format!("{:.*}", decimals, x))
}

/// [`format_sig`] at [`DECIMAL_DIGITS`].
pub fn format_decimal(x: f64) -> String {
    format_sig(x, DECIMAL_DIGITS)
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn trim_exponent(s: &str) -> String {
    match s.split_once('e') {
        Some((mantissa, exp)) => format!("{}e{}", trim_zeros(mantissa.to_string()), exp),
        None => s.to_string(),
    }
}

/// A labelled sequence of `(x, y)` points with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::domain("plot series x values must be strictly increasing"));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::domain("plot series values must be finite"));
        }
        Ok(PlotSeries {
            label: label.into(),
            points,
        })
    }

    /// Like [`PlotSeries::new`] but also requires every `y` in `[0, 1]`.
    pub fn fraction(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|&(_, y)| !(0.0..=1.0).contains(&y)) {
            return Err(Error::domain("fraction series values must lie in [0, 1]"));
        }
        PlotSeries::new(label, points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// One `x y` line per point, newline-terminated, no header.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for &(x, y) in &self.points {
            let _ = writeln!(out, "{} {}", format_decimal(x), format_decimal(y));
        }
        out
    }
}
