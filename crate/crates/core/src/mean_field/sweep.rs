//! Temperature sweeps with branch continuation and transition detection.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::MaterialModel;
use super::solver::{solve_self_consistent, SelfConsistentResult};
use crate::error::{Error, Result};

/// Adjacent points whose `|delta m|` exceeds this are a jump.
pub const JUMP_THRESHOLD: f64 = 0.1;
/// Seed floor used while cooling in zero field, where `m = 0` is always a fixed point.
pub const BRANCH_SEED: f64 = 1e-3;
/// Up and down branches closer than this pointwise count as one branch.
pub const BRANCH_COINCIDENCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    /// Up sweeps start on the ordered branch, down sweeps on the paramagnetic one.
    pub fn default_seed(self) -> f64 {
        match self {
            SweepDirection::Up => 1.0,
            SweepDirection::Down => 0.0,
        }
    }
}

impl fmt::Display for SweepDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepDirection::Up => "up",
            SweepDirection::Down => "down",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchTag {
    /// Warm-started from the previous converged point.
    Continued,
    /// Started from the caller's seed or the symmetry-breaking floor.
    Reseeded,
    /// Solution left the previous basin (`|delta m| > JUMP_THRESHOLD`).
    Jumped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub temperature: f64,
    pub result: SelfConsistentResult,
    pub tag: BranchTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Midpoint of the two grid temperatures straddling the jump.
    pub temperature: f64,
    pub from_temperature: f64,
    pub to_temperature: f64,
    /// `m(after) - m(before)` in sweep order.
    pub delta_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub direction: SweepDirection,
    pub b0: f64,
    /// In sweep order.
    pub points: Vec<SweepPoint>,
    pub transitions: Vec<Transition>,
}

impl SweepResult {
    /// Reduced magnetization ordered by ascending temperature.
    pub fn m_ascending(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.points.iter().map(|p| p.result.m).collect();
        if self.direction == SweepDirection::Down {
            m.reverse();
        }
        m
    }

    /// Points ordered by ascending temperature.
    pub fn ascending(&self) -> Vec<SweepPoint> {
        let mut pts = self.points.clone();
        if self.direction == SweepDirection::Down {
            pts.reverse();
        }
        pts
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(t) = grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidGrid(format!("temperature {t} is not finite and >= 0")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Walks `grid` (ascending) in `direction`, warm-starting every solve from
/// the previous solution so metastable branches persist until they vanish.
pub fn sweep_temperature(
    model: &MaterialModel,
    grid: &[f64],
    b0: f64,
    direction: SweepDirection,
    seed: f64,
) -> Result<SweepResult> {
    validate_grid(grid)?;
    let symmetric_cooling = direction == SweepDirection::Down && b0 == 0.0;
    let order: Box<dyn Iterator<Item = &f64>> = match direction {
        SweepDirection::Up => Box::new(grid.iter()),
        SweepDirection::Down => Box::new(grid.iter().rev()),
    };

    let mut points: Vec<SweepPoint> = Vec::with_capacity(grid.len());
    let mut transitions = Vec::new();
    for &temperature in order {
        let previous = points.last().map(|p| (p.temperature, p.result.m));
        let start = previous.map_or(seed, |(_, m)| m);
        let (m_init, mut tag) = if symmetric_cooling && start.abs() < BRANCH_SEED {
            (BRANCH_SEED, BranchTag::Reseeded)
        } else if previous.is_some() {
            (start, BranchTag::Continued)
        } else {
            (start, BranchTag::Reseeded)
        };

        let result = solve_self_consistent(model, temperature, b0, m_init)?;
        if !result.converged {
            return Err(Error::NonConvergence {
                temperature,
                field: b0,
                residual: result.residual,
                iterations: result.iterations,
            });
        }
        if let Some((t_prev, m_prev)) = previous {
            let delta_m = result.m - m_prev;
            if delta_m.abs() > JUMP_THRESHOLD {
                tag = BranchTag::Jumped;
                transitions.push(Transition {
                    temperature: 0.5 * (t_prev + temperature),
                    from_temperature: t_prev,
                    to_temperature: temperature,
                    delta_m,
                });
            }
        }
        points.push(SweepPoint {
            temperature,
            result,
            tag,
        });
    }

    Ok(SweepResult {
        direction,
        b0,
        points,
        transitions,
    })
}

/// Largest pointwise `|m_up - m_down|` between two sweeps of the same grid.
pub fn max_branch_gap(up: &SweepResult, down: &SweepResult) -> f64 {
    up.m_ascending()
        .iter()
        .zip(down.m_ascending())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldScanRow {
    pub b0: f64,
    pub up_transitions: Vec<Transition>,
    pub down_transitions: Vec<Transition>,
    pub max_branch_gap: f64,
}

impl FieldScanRow {
    pub fn is_jump_free(&self) -> bool {
        self.up_transitions.is_empty() && self.down_transitions.is_empty() && self.max_branch_gap < BRANCH_COINCIDENCE
    }

    /// `T_up - T_down` of the first jumps, when both sweeps jump.
    pub fn hysteresis_width(&self) -> Option<f64> {
        match (self.up_transitions.first(), self.down_transitions.first()) {
            (Some(u), Some(d)) => Some(u.temperature - d.temperature),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalFieldScan {
    pub critical_field: f64,
    /// One row per field examined, up to and including the critical one.
    pub rows: Vec<FieldScanRow>,
}

pub fn scan_field(model: &MaterialModel, t_grid: &[f64], b0: f64) -> Result<FieldScanRow> {
    let up = sweep_temperature(model, t_grid, b0, SweepDirection::Up, SweepDirection::Up.default_seed())?;
    let down = sweep_temperature(
        model,
        t_grid,
        b0,
        SweepDirection::Down,
        SweepDirection::Down.default_seed(),
    )?;
    Ok(FieldScanRow {
        b0,
        max_branch_gap: max_branch_gap(&up, &down),
        up_transitions: up.transitions,
        down_transitions: down.transitions,
    })
}

/// Smallest field in `b_grid` at which neither sweep direction jumps and the
/// two branches coincide. Resolution is the `b_grid` spacing.
pub fn find_critical_field(model: &MaterialModel, t_grid: &[f64], b_grid: &[f64]) -> Result<CriticalFieldScan> {
    validate_grid(t_grid)?;
    if b_grid.is_empty() {
        return Err(Error::InvalidGrid("field grid is empty".into()));
    }
    if b_grid.windows(2).any(|w| w[1] <= w[0]) || b_grid.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidGrid(
            "field grid must be finite and strictly ascending".into(),
        ));
    }
    let mut rows = Vec::new();
    for &b0 in b_grid {
        let row = scan_field(model, t_grid, b0)?;
        let done = row.is_jump_free();
        rows.push(row);
        if done {
            return Ok(CriticalFieldScan {
                critical_field: b0,
                rows,
            });
        }
    }
    Err(Error::NotBracketed {
        max_field: *b_grid.last().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_field::CubicRatioUnits;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    fn first_order() -> MaterialModel {
        MaterialModel::default_second_order()
            .with_cubic_ratio(0.01, CubicRatioUnits::Molar)
            .unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[1.0, 1.0]).is_err());
        assert!(validate_grid(&[2.0, 1.0]).is_err());
        assert!(validate_grid(&[-1.0, 1.0]).is_err());
        assert!(validate_grid(&[0.0, 1.0, f64::NAN]).is_err());
        assert!(validate_grid(&[0.0, 1.0]).is_ok());
    }

    #[test]
    fn second_order_has_no_hysteresis() {
        let model = MaterialModel::default_second_order();
        let tc = model.critical_temperature().unwrap();
        let grid = linspace(0.0, 2.0 * tc, 2001);
        let up = sweep_temperature(&model, &grid, 0.0, SweepDirection::Up, 1.0).unwrap();
        let down = sweep_temperature(&model, &grid, 0.0, SweepDirection::Down, 0.0).unwrap();
        assert!(max_branch_gap(&up, &down) < 1e-8);
        assert!(up.transitions.is_empty() && down.transitions.is_empty());
        let m = up.m_ascending();
        assert!(m.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn sweep_order_and_tags() {
        let model = MaterialModel::default_second_order();
        let grid = [10.0, 20.0, 30.0];
        let down = sweep_temperature(&model, &grid, 0.0, SweepDirection::Down, 0.0).unwrap();
        let temps: Vec<f64> = down.points.iter().map(|p| p.temperature).collect();
        assert_eq!(temps, vec![30.0, 20.0, 10.0]);
        assert_eq!(down.points[0].tag, BranchTag::Reseeded);
        let up = sweep_temperature(&model, &grid, 0.0, SweepDirection::Up, 1.0).unwrap();
        assert_eq!(up.points[1].tag, BranchTag::Continued);
    }

    #[test]
    fn first_order_hysteresis() {
        let model = first_order();
        let tc = model.critical_temperature().unwrap();
        let grid = linspace(0.0, 2.5 * tc, 501);
        let up = sweep_temperature(&model, &grid, 0.0, SweepDirection::Up, 1.0).unwrap();
        let down = sweep_temperature(&model, &grid, 0.0, SweepDirection::Down, 0.0).unwrap();
        assert_eq!(up.transitions.len(), 1);
        assert_eq!(down.transitions.len(), 1);
        let t_up = up.transitions[0].temperature;
        let t_down = down.transitions[0].temperature;
        assert!(t_up > t_down + 0.5 * tc, "up {t_up} down {t_down}");
        // cooling enters the ordered branch where m = 0 goes unstable
        assert!((t_down - tc).abs() <= grid[1] - grid[0]);
        for sweep in [&up, &down] {
            let jumped: Vec<_> = sweep.points.iter().filter(|p| p.tag == BranchTag::Jumped).collect();
            assert_eq!(jumped.len(), 1);
        }
    }

    #[test]
    fn invalid_seed_aborts_sweep() {
        let model = MaterialModel::default_second_order();
        assert!(sweep_temperature(&model, &[10.0], 0.0, SweepDirection::Up, 2.0).is_err());
    }

    #[test]
    fn critical_field_for_second_order_is_first_grid_value() {
        let model = MaterialModel::default_second_order();
        let tc = model.critical_temperature().unwrap();
        let grid = linspace(0.0, 2.0 * tc, 4001);
        let scan = find_critical_field(&model, &grid, &[0.0, 1.0]).unwrap();
        assert_eq!(scan.critical_field, 0.0);
    }

    #[test]
    fn critical_field_not_bracketed() {
        let model = first_order();
        let tc = model.critical_temperature().unwrap();
        let grid = linspace(0.0, 3.0 * tc, 301);
        let err = find_critical_field(&model, &grid, &[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotBracketed { .. }));
    }
}
