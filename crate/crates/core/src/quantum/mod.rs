//! Four-level density-matrix algebra: thermal targets, pseudo-pure states,
//! pulse rotations, coherence cancellation, trace distance and readout.

mod density;
mod matrix;
mod rotation;

pub use density::{
    boltzmann_populations, magnetization_readout, thermal_density_matrix, trace_distance, zero_coherences,
    DensityMatrix, PseudoPureState, DENSITY_TOLERANCE, LEVEL_PROJECTIONS,
};
pub use matrix::{hermitian_eigen, HermitianEigen, Matrix4, DIM};
pub use rotation::{
    apply_rotations, composite_unitary, populations_from_angles, pulse_populations, rotation_operator, Axis,
    PulseAngles, Qubit,
};
