//! Magnetization-in, magnetization-out pipelines for the second- and
//! first-order models.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle_mapper::{converged_solution, map_solution, AngleMapEntry, MapMethod};
use crate::error::{Error, Result};
use crate::mean_field::{max_branch_gap, sweep_temperature, BranchTag, MaterialModel, SweepDirection, Transition};
use crate::quantum::{apply_rotations, magnetization_readout, zero_coherences, PseudoPureState, PulseAngles};

/// Largest accepted `|M_mf - M_nmr| / (g mu_B S)`.
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Up,
    Down,
    Single,
}

impl From<SweepDirection> for Branch {
    fn from(d: SweepDirection) -> Self {
        match d {
            SweepDirection::Up => Branch::Up,
            SweepDirection::Down => Branch::Down,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Up => "up",
            Branch::Down => "down",
            Branch::Single => "single",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub b0: f64,
    pub temperature: f64,
    /// `T / T_c`; `None` when the model has no ordering temperature.
    pub t_reduced: Option<f64>,
    pub branch: Branch,
    pub m: f64,
    /// Mean-field magnetization, J/T per ion.
    pub magnetization: f64,
    pub b_eff: f64,
    /// Magnetization read back from the written state, J/T per ion.
    pub m_nmr: f64,
    pub discrepancy: f64,
    pub angles: PulseAngles,
    pub trace_distance: f64,
    pub method: MapMethod,
    pub tag: BranchTag,
}

/// Rotates the ground pseudo-pure state by the entry's angles, cancels
/// coherences and reads the magnetization of the deviation part.
pub fn write_entry(model: &MaterialModel, entry: &AngleMapEntry, branch: Branch, epsilon: f64) -> Result<CurvePoint> {
    let pps = PseudoPureState::ground(epsilon)?;
    let rotated = apply_rotations(&pps, &entry.angles);
    let written = zero_coherences(rotated.rho1());
    let m_nmr = magnetization_readout(&written, model)?;
    let magnetization = entry.solution.magnetization;
    let discrepancy = (magnetization - m_nmr).abs() / model.saturation_moment();
    if discrepancy.is_nan() || discrepancy >= ROUNDTRIP_TOLERANCE {
        return Err(Error::RoundTrip {
            temperature: entry.temperature,
            discrepancy,
        });
    }
    Ok(CurvePoint {
        b0: entry.b0,
        temperature: entry.temperature,
        t_reduced: model.critical_temperature().ok().map(|tc| entry.temperature / tc),
        branch,
        m: entry.m,
        magnetization,
        b_eff: entry.solution.b_eff,
        m_nmr,
        discrepancy,
        angles: entry.angles,
        trace_distance: entry.achieved_distance,
        method: entry.method,
        tag: entry.tag,
    })
}

/// One sweep direction written point by point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCurve {
    pub b0: f64,
    pub direction: SweepDirection,
    /// Ascending temperature.
    pub points: Vec<CurvePoint>,
    pub transitions: Vec<Transition>,
}

pub fn write_branch(
    model: &MaterialModel,
    grid: &[f64],
    b0: f64,
    direction: SweepDirection,
    branch: Branch,
    epsilon: f64,
) -> Result<BranchCurve> {
    let sweep = sweep_temperature(model, grid, b0, direction, direction.default_seed())?;
    let points = sweep
        .ascending()
        .into_iter()
        .map(|p| {
            let entry = map_solution(model, p.temperature, b0, p.result, p.tag)?;
            write_entry(model, &entry, branch, epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BranchCurve {
        b0,
        direction,
        points,
        transitions: sweep.transitions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderCurve {
    pub b0: f64,
    pub curve: BranchCurve,
    /// Pointwise `max |m_up - m_down|` from an independent cooling sweep.
    pub max_branch_gap: f64,
}

/// Magnetization curves of the `lambda' = 0` model, one per field.
pub fn run_second_order(
    model: &MaterialModel,
    grid: &[f64],
    b0_list: &[f64],
    epsilon: f64,
) -> Result<Vec<SecondOrderCurve>> {
    if model.is_first_order() {
        return Err(Error::Domain("second-order experiment needs lambda' = 0".into()));
    }
    b0_list
        .iter()
        .map(|&b0| {
            let curve = write_branch(model, grid, b0, SweepDirection::Up, Branch::Single, epsilon)?;
            let up = sweep_temperature(model, grid, b0, SweepDirection::Up, SweepDirection::Up.default_seed())?;
            let down = sweep_temperature(
                model,
                grid,
                b0,
                SweepDirection::Down,
                SweepDirection::Down.default_seed(),
            )?;
            Ok(SecondOrderCurve {
                b0,
                curve,
                max_branch_gap: max_branch_gap(&up, &down),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisPair {
    pub b0: f64,
    pub up: BranchCurve,
    pub down: BranchCurve,
    pub max_branch_gap: f64,
}

impl HysteresisPair {
    /// Heating minus cooling jump temperature, if both directions jump.
    pub fn hysteresis_width(&self) -> Option<f64> {
        match (self.up.transitions.first(), self.down.transitions.first()) {
            (Some(u), Some(d)) => Some(u.temperature - d.temperature),
            _ => None,
        }
    }

    pub fn is_jump_free(&self) -> bool {
        self.up.transitions.is_empty() && self.down.transitions.is_empty()
    }
}

/// Heating and cooling branches of the `lambda' != 0` model, one pair per field.
pub fn run_first_order(
    model: &MaterialModel,
    grid: &[f64],
    b0_list: &[f64],
    epsilon: f64,
) -> Result<Vec<HysteresisPair>> {
    if !model.is_first_order() {
        return Err(Error::Domain("first-order experiment needs lambda' != 0".into()));
    }
    b0_list
        .iter()
        .map(|&b0| {
            let up = write_branch(model, grid, b0, SweepDirection::Up, Branch::Up, epsilon)?;
            let down = write_branch(model, grid, b0, SweepDirection::Down, Branch::Down, epsilon)?;
            let gap = up
                .points
                .iter()
                .zip(&down.points)
                .map(|(a, b)| (a.m - b.m).abs())
                .fold(0.0, f64::max);
            Ok(HysteresisPair {
                b0,
                up,
                down,
                max_branch_gap: gap,
            })
        })
        .collect()
}

/// Single-temperature write and readback.
pub fn roundtrip_magnetization(
    model: &MaterialModel,
    temperature: f64,
    b0: f64,
    branch_seed: f64,
    epsilon: f64,
) -> Result<CurvePoint> {
    let solution = converged_solution(model, temperature, b0, branch_seed)?;
    let entry = map_solution(model, temperature, b0, solution, BranchTag::Reseeded)?;
    write_entry(model, &entry, Branch::Single, epsilon)
}
