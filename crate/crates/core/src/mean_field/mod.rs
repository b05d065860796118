//! Mean-field magnetization: Brillouin function, self-consistent solver,
//! free energy and branch-tracking temperature sweeps.

mod brillouin;
mod free_energy;
mod model;
mod solver;
mod sweep;

pub use brillouin::{brillouin, Spin};
pub use free_energy::{free_energy, free_energy_gradient};
pub use model::{lambda_from_exchange, Coupling, CubicRatioUnits, MaterialModel};
pub use solver::{solve_self_consistent, SelfConsistentResult, SolveMethod, DAMPING, MAX_ITERATIONS, SOLVER_TOLERANCE};
pub use sweep::{
    find_critical_field, max_branch_gap, scan_field, sweep_temperature, validate_grid, BranchTag, CriticalFieldScan,
    FieldScanRow, SweepDirection, SweepPoint, SweepResult, Transition, BRANCH_COINCIDENCE, BRANCH_SEED, JUMP_THRESHOLD,
};
