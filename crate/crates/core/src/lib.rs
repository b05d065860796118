//! Writes the thermal states of a mean-field ferromagnet into a four-level
//! pseudo-pure spin system and reads them back.
//!
//! The pipeline is: solve the self-consistent magnetization
//! ([`mean_field`]), build the Boltzmann target state ([`quantum`]), invert
//! it into single-qubit pulse angles certified by trace distance
//! ([`angle_mapper`]), then rotate the pseudo-pure state, cancel coherences
//! and read the magnetization back ([`experiment`]).

pub mod angle_mapper;
pub mod constants;
pub mod error;
pub mod experiment;
pub mod mean_field;
pub mod quantum;

pub use angle_mapper::{
    build_angle_table, invert_populations, refine_numeric, target_state, AngleMapEntry, MapMethod, RefineOptions,
    Refinement, CERTIFICATION_THRESHOLD,
};
pub use constants::{PhysicalConstants, BOHR_MAGNETON, BOLTZMANN, CODATA};
pub use error::{Error, Result};
pub use experiment::{
    roundtrip_magnetization, run_first_order, run_second_order, write_branch, Branch, CurvePoint, HysteresisPair,
    SecondOrderCurve, ROUNDTRIP_TOLERANCE,
};
pub use mean_field::{
    brillouin, find_critical_field, solve_self_consistent, sweep_temperature, CubicRatioUnits, MaterialModel,
    SelfConsistentResult, Spin, SweepDirection, SweepResult,
};
pub use quantum::{
    apply_rotations, magnetization_readout, populations_from_angles, rotation_operator, thermal_density_matrix,
    trace_distance, zero_coherences, Axis, DensityMatrix, Matrix4, PseudoPureState, PulseAngles, Qubit,
};
