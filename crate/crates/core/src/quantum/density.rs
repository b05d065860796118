use num_complex::Complex64;

use super::matrix::{hermitian_eigen, Matrix4, DIM};
use crate::constants::{BOHR_MAGNETON, BOLTZMANN};
use crate::error::{Error, Result};
use crate::mean_field::{MaterialModel, Spin};

pub const DENSITY_TOLERANCE: f64 = 1e-12;

/// Spin projections carried by `|00>, |01>, |10>, |11>`: lowest energy first
/// for a positive field.
pub const LEVEL_PROJECTIONS: [f64; DIM] = [1.5, 0.5, -0.5, -1.5];

/// Hermitian, unit-trace, positive semidefinite 4x4 matrix over
/// `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4);

impl DensityMatrix {
    pub fn new(m: Matrix4) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidDensityMatrix("non-finite entries".into()));
        }
        let herm = m.hermiticity_error();
        if herm > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (error {herm:e})")));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigen(&m).values.into_iter().fold(f64::INFINITY, f64::min);
        if min < -DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    /// For results of trace-preserving maps on valid inputs.
    pub(crate) fn new_unchecked(m: Matrix4) -> Self {
        DensityMatrix(m)
    }

    pub fn from_populations(p: [f64; DIM]) -> Result<Self> {
        DensityMatrix::new(Matrix4::from_diagonal(p))
    }

    /// `|k><k|` for basis index `k` (0 = `|00>`).
    pub fn basis(k: usize) -> Self {
        assert!(k < DIM, "basis index {k} out of range");
        DensityMatrix(Matrix4::projector(k, k))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix4::identity().scale(0.25))
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.0
    }

    pub fn populations(&self) -> [f64; DIM] {
        self.0.diagonal()
    }

    pub fn eigenvalues(&self) -> [f64; DIM] {
        hermitian_eigen(&self.0).values
    }

    pub fn is_diagonal(&self) -> bool {
        (0..DIM).all(|i| (0..DIM).all(|j| i == j || self.0[(i, j)].norm() == 0.0))
    }

    /// Checks the invariants again; for use after long operation chains.
    pub fn validate(&self) -> Result<()> {
        DensityMatrix::new(self.0).map(|_| ())
    }
}

/// `(1 - eps)/4 I + eps rho1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoPureState {
    epsilon: f64,
    rho1: DensityMatrix,
}

impl PseudoPureState {
    /// Room-temperature polarization scale.
    pub const DEFAULT_EPSILON: f64 = 1e-5;

    pub fn new(epsilon: f64, rho1: DensityMatrix) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        Ok(PseudoPureState { epsilon, rho1 })
    }

    /// The `|00><00|` pseudo-pure state every writing sequence starts from.
    pub fn ground(epsilon: f64) -> Result<Self> {
        PseudoPureState::new(epsilon, DensityMatrix::basis(0))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho1(&self) -> &DensityMatrix {
        &self.rho1
    }

    pub(crate) fn with_rho1(&self, rho1: DensityMatrix) -> Self {
        PseudoPureState {
            epsilon: self.epsilon,
            rho1,
        }
    }

    pub fn full(&self) -> DensityMatrix {
        let m = Matrix4::identity().scale((1.0 - self.epsilon) / DIM as f64) + self.rho1.0.scale(self.epsilon);
        DensityMatrix(m)
    }
}

fn require_four_levels(spin: Spin) -> Result<()> {
    if spin != Spin::THREE_HALVES {
        return Err(Error::UnsupportedSpin(spin.value()));
    }
    Ok(())
}

/// Boltzmann state of `H = -g mu_B B_eff S_z` for S = 3/2, with
/// `m = 3/2, 1/2, -1/2, -3/2` on `|00>, ..., |11>`.
pub fn thermal_density_matrix(model: &MaterialModel, b_eff: f64, temperature: f64) -> Result<DensityMatrix> {
    require_four_levels(model.spin)?;
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
    }
    if !b_eff.is_finite() {
        return Err(Error::Domain(format!("effective field must be finite, got {b_eff}")));
    }
    if b_eff == 0.0 || temperature == f64::INFINITY {
        return Ok(DensityMatrix::maximally_mixed());
    }
    if temperature == 0.0 {
        return Ok(DensityMatrix::basis(if b_eff > 0.0 { 0 } else { DIM - 1 }));
    }
    let y = model.g * BOHR_MAGNETON * b_eff / (BOLTZMANN * temperature);
    Ok(DensityMatrix::new_unchecked(Matrix4::from_diagonal(
        boltzmann_populations(y),
    )))
}

/// Normalized `exp(y m)` over the four levels, shifted by `|y| S`.
pub fn boltzmann_populations(y: f64) -> [f64; DIM] {
    let shift = 1.5 * y.abs();
    let w = LEVEL_PROJECTIONS.map(|m| (y * m - shift).exp());
    let z: f64 = w.iter().sum();
    w.map(|x| x / z)
}

/// Keeps the diagonal: the net effect of temporal averaging over phase-cycled
/// repetitions.
pub fn zero_coherences(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix(Matrix4::from_diagonal(rho.populations()))
}

/// `D = tr|rho - sigma| / 2` from the eigenvalues of the difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let diff = rho.0 - sigma.0;
    0.5 * hermitian_eigen(&diff).values.iter().map(|l| l.abs()).sum::<f64>()
}

/// `M = g mu_B sum_k p_k m_k`, J/T. Only the diagonal is used.
pub fn magnetization_readout(rho: &DensityMatrix, model: &MaterialModel) -> Result<f64> {
    require_four_levels(model.spin)?;
    let mean: f64 = rho
        .populations()
        .iter()
        .zip(LEVEL_PROJECTIONS)
        .map(|(p, m)| p * m)
        .sum();
    Ok(model.g * BOHR_MAGNETON * mean)
}
