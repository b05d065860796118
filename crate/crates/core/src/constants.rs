//! CODATA 2018 constants used throughout the crate.

/// Physical constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Bohr magneton, J/T.
    pub mu_b: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Avogadro constant, 1/mol.
    pub n_a: f64,
}

/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Avogadro constant, 1/mol.
pub const AVOGADRO: f64 = 6.022_140_76e23;

pub const CODATA: PhysicalConstants = PhysicalConstants {
    mu_b: BOHR_MAGNETON,
    k_b: BOLTZMANN,
    n_a: AVOGADRO,
};
