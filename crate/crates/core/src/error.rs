use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model parameter `{field}`: {reason}")]
    InvalidModel { field: &'static str, reason: String },

    #[error("spin S = {0} is not supported here; the four-level mapping needs S = 3/2")]
    UnsupportedSpin(f64),

    #[error("invalid temperature grid: {0}")]
    InvalidGrid(String),

    #[error(
        "self-consistent solve did not converge at T = {temperature} K, B0 = {field} T \
         (residual {residual:e} after {iterations} iterations)"
    )]
    NonConvergence {
        temperature: f64,
        field: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("critical field not bracketed: a jump or hysteresis persists at every field up to {max_field} T")]
    NotBracketed { max_field: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("populations not representable by product rotations: |p00*p11 - p01*p10| = {0:e}")]
    NotProductState(f64),

    #[error("invalid populations: {0}")]
    InvalidPopulations(String),

    #[error("refinement failed: best trace distance {best_distance:e} is not below {threshold:e}")]
    RefinementFailed { best_distance: f64, threshold: f64 },

    #[error("angle certification failed at T = {temperature} K: best trace distance {best_distance:e}")]
    Certification { temperature: f64, best_distance: f64 },

    #[error("round-trip mismatch at T = {temperature} K: |M_mf - M_nmr| / (g mu_B S) = {discrepancy:e}")]
    RoundTrip { temperature: f64, discrepancy: f64 },
}
