//! Single-qubit pulse rotations on the two-qubit register.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::{DensityMatrix, PseudoPureState};
use super::matrix::Matrix4;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// `A` is the first tensor factor (most significant bit of the basis label).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    A,
    B,
}

type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const IDENTITY2: Matrix2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

/// `exp(-i theta sigma / 2)`.
fn single_qubit(axis: Axis, theta: f64) -> Matrix2 {
    let (s, co) = (0.5 * theta).sin_cos();
    match axis {
        Axis::X => [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]],
        Axis::Y => [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
    }
}

/// Rotation by `theta` about `axis` on one qubit, identity on the other.
pub fn rotation_operator(axis: Axis, qubit: Qubit, theta: f64) -> Matrix4 {
    let r = single_qubit(axis, theta);
    match qubit {
        Qubit::A => Matrix4::kron(&r, &IDENTITY2),
        Qubit::B => Matrix4::kron(&IDENTITY2, &r),
    }
}

/// Pulse angles in radians, each in the canonical range `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseAngles {
    theta_x_a: f64,
    theta_y_a: f64,
    theta_x_b: f64,
    theta_y_b: f64,
}

impl PulseAngles {
    pub const ZERO: PulseAngles = PulseAngles {
        theta_x_a: 0.0,
        theta_y_a: 0.0,
        theta_x_b: 0.0,
        theta_y_b: 0.0,
    };

    pub fn new(theta_x_a: f64, theta_y_a: f64, theta_x_b: f64, theta_y_b: f64) -> Result<Self> {
        let angles = [theta_x_a, theta_y_a, theta_x_b, theta_y_b];
        if let Some(bad) = angles.iter().find(|t| !(t.is_finite() && (0.0..=PI).contains(*t))) {
            return Err(Error::Domain(format!("pulse angle {bad} outside [0, pi]")));
        }
        Ok(PulseAngles {
            theta_x_a,
            theta_y_a,
            theta_x_b,
            theta_y_b,
        })
    }

    /// Maps arbitrary finite angles into `[0, pi]` keeping each cosine.
    ///
    /// Populations depend only on the cosines, so the written diagonal is
    /// unchanged; coherences may flip sign.
    pub fn canonical(raw: [f64; 4]) -> Result<Self> {
        let fold = |t: f64| {
            let r = t.rem_euclid(TAU);
            if r > PI {
                TAU - r
            } else {
                r
            }
        };
        if raw.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("pulse angles must be finite".into()));
        }
        let [a, b, cc, d] = raw.map(fold);
        PulseAngles::new(a, b, cc, d)
    }

    pub fn theta_x_a(&self) -> f64 {
        self.theta_x_a
    }

    pub fn theta_y_a(&self) -> f64 {
        self.theta_y_a
    }

    pub fn theta_x_b(&self) -> f64 {
        self.theta_x_b
    }

    pub fn theta_y_b(&self) -> f64 {
        self.theta_y_b
    }

    /// `[theta_x_a, theta_y_a, theta_x_b, theta_y_b]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.theta_x_a, self.theta_y_a, self.theta_x_b, self.theta_y_b]
    }
}

/// `U = R_x(A) R_x(B) R_y(A) R_y(B)` for raw angles in `as_array` order.
pub fn composite_unitary(raw: [f64; 4]) -> Matrix4 {
    let [xa, ya, xb, yb] = raw;
    rotation_operator(Axis::X, Qubit::A, xa)
        * rotation_operator(Axis::X, Qubit::B, xb)
        * rotation_operator(Axis::Y, Qubit::A, ya)
        * rotation_operator(Axis::Y, Qubit::B, yb)
}

/// Conjugates the deviation part by the pulse unitary; the identity part
/// is invariant.
pub fn apply_rotations(state: &PseudoPureState, angles: &PulseAngles) -> PseudoPureState {
    let u = composite_unitary(angles.as_array());
    let rotated = state.rho1().matrix().conjugate_by(&u);
    state.with_rho1(DensityMatrix::new_unchecked(rotated))
}

/// Closed-form populations of `U |00><00| U^dagger`.
pub fn populations_from_angles(angles: &PulseAngles) -> [f64; 4] {
    pulse_populations(angles.as_array())
}

/// Same as [`populations_from_angles`] for unconstrained angles.
pub fn pulse_populations(raw: [f64; 4]) -> [f64; 4] {
    let [xa, ya, xb, yb] = raw;
    let ca = xa.cos() * ya.cos();
    let cb = xb.cos() * yb.cos();
    [
        0.25 * (1.0 + ca) * (1.0 + cb),
        0.25 * (1.0 + ca) * (1.0 - cb),
        0.25 * (1.0 - ca) * (1.0 + cb),
        0.25 * (1.0 - ca) * (1.0 - cb),
    ]
}
