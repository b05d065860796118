//! Brillouin function as the exact thermal average of a free spin.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin quantum number, stored as `2S` so that half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const THREE_HALVES: Spin = Spin(3);

    pub fn from_twice(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::InvalidModel {
                field: "spin",
                reason: "S must be at least 1/2".into(),
            });
        }
        Ok(Spin(two_s))
    }

    /// Accepts any positive multiple of 1/2.
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !twice.is_finite() || twice < 1.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidModel {
                field: "spin",
                reason: format!("S = {s} is not a positive half-integer"),
            });
        }
        Spin::from_twice(twice.round() as u32)
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    /// Number of Zeeman levels, `2S + 1`.
    pub fn multiplicity(self) -> usize {
        self.0 as usize + 1
    }

    /// Projections `m = S, S-1, ..., -S` in that order.
    pub fn projections(self) -> impl Iterator<Item = f64> {
        let two_s = self.0 as i64;
        (0..=two_s).map(move |k| (two_s - 2 * k) as f64 / 2.0)
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Spin::new(s)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `<S_z>/S` for a free spin with Boltzmann weights `exp(y m)`.
///
/// `y = g mu_B B / (k_B T)`; note there is no factor of `S` in the argument.
/// Weights are shifted by `|y| S` before exponentiating and the numerator
/// is built from `expm1` pairs, so the result is accurate for tiny `y` and
/// does not overflow for huge `y`.
pub fn brillouin(spin: Spin, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain(format!("Brillouin argument must be finite, got {y}")));
    }
    Ok(brillouin_unchecked(spin, y))
}

pub(crate) fn brillouin_unchecked(spin: Spin, y: f64) -> f64 {
    let (mean, _) = moments(spin, y.abs());
    let value = (mean / spin.value()).min(1.0);
    if y < 0.0 {
        -value
    } else {
        value
    }
}

/// `d brillouin / dy = Var(m) / S`.
pub(crate) fn brillouin_slope(spin: Spin, y: f64) -> f64 {
    let (_, var) = moments(spin, y.abs());
    var / spin.value()
}

/// Mean and variance of `m` under weights `exp(y m)`, for `y >= 0`.
fn moments(spin: Spin, y: f64) -> (f64, f64) {
    let s = spin.value();
    let mut numerator = 0.0;
    let mut deficit = 0.0;
    let mut partition = 0.0;
    let mut second = 0.0;
    // Pair +m with -m: w(+m) - w(-m) = w(-m) * expm1(2 y m), w(m) = exp(y (m - S)).
    for m in spin.projections().filter(|&m| m >= 0.0) {
        let w_minus = (-y * (m + s)).exp();
        deficit += (s + m) * w_minus;
        if m == 0.0 {
            partition += w_minus;
            continue;
        }
        let w_plus = (y * (m - s)).exp();
        deficit += (s - m) * w_plus;
        let spread = 2.0 * y * m;
        numerator += m * if spread < 1.0 {
            w_minus * spread.exp_m1()
        } else {
            w_plus - w_minus
        };
        partition += w_plus + w_minus;
        second += m * m * (w_plus + w_minus);
    }
    // Near saturation S - <m> is the small, well-conditioned quantity.
    let mean = if y * s < 1.0 {
        numerator / partition
    } else {
        s - deficit / partition
    };
    let var = (second / partition - mean * mean).max(0.0);
    (mean, var)
}

/// `ln Z` of the Zeeman levels, `Z = sum_m exp(y m)`.
pub(crate) fn log_partition(spin: Spin, y: f64) -> f64 {
    let s = spin.value();
    let a = y.abs();
    let shifted: f64 = spin.projections().map(|m| (a * (m - s)).exp()).sum();
    a * s + shifted.ln()
}
