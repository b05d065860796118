//! Inverts target thermal states into pulse angles and certifies them by
//! trace distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mean_field::{
    solve_self_consistent, sweep_temperature, BranchTag, MaterialModel, SelfConsistentResult, SweepDirection,
};
use crate::quantum::{
    composite_unitary, thermal_density_matrix, trace_distance, zero_coherences, DensityMatrix, PulseAngles,
};

/// Every accepted entry writes its target to within this trace distance.
pub const CERTIFICATION_THRESHOLD: f64 = 1e-3;
/// Tolerance on `|p00 p11 - p01 p10|` for product-rotation inversion.
pub const PRODUCT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMethod {
    Analytic,
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleMapEntry {
    pub temperature: f64,
    pub b0: f64,
    /// Reduced magnetization the target was built from.
    pub m: f64,
    pub angles: PulseAngles,
    pub achieved_distance: f64,
    pub method: MapMethod,
    pub solution: SelfConsistentResult,
    pub tag: BranchTag,
}

/// Thermal state at the self-consistent effective field.
pub fn target_state(model: &MaterialModel, temperature: f64, b0: f64, branch_seed: f64) -> Result<DensityMatrix> {
    let solution = converged_solution(model, temperature, b0, branch_seed)?;
    thermal_density_matrix(model, solution.b_eff, temperature)
}

pub(crate) fn converged_solution(
    model: &MaterialModel,
    temperature: f64,
    b0: f64,
    seed: f64,
) -> Result<SelfConsistentResult> {
    let solution = solve_self_consistent(model, temperature, b0, seed)?;
    if !solution.converged {
        return Err(Error::NonConvergence {
            temperature,
            field: b0,
            residual: solution.residual,
            iterations: solution.iterations,
        });
    }
    Ok(solution)
}

/// Analytic inverse of the closed-form populations with `theta_y = 0`.
pub fn invert_populations(p: [f64; 4]) -> Result<PulseAngles> {
    if p.iter().any(|x| !x.is_finite() || *x < -1e-12) {
        return Err(Error::InvalidPopulations(format!(
            "{p:?} has negative or non-finite entries"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PRODUCT_TOLERANCE {
        return Err(Error::InvalidPopulations(format!("populations sum to {total}")));
    }
    let defect = (p[0] * p[3] - p[1] * p[2]).abs();
    if defect >= PRODUCT_TOLERANCE {
        return Err(Error::NotProductState(defect));
    }
    let c_a = (2.0 * (p[0] + p[1]) - 1.0).clamp(-1.0, 1.0);
    let c_b = (2.0 * (p[0] + p[2]) - 1.0).clamp(-1.0, 1.0);
    PulseAngles::new(c_a.acos(), 0.0, c_b.acos(), 0.0)
}

/// Diagonal of the pulse-rotated `|00><00|` after coherence cancellation.
pub fn written_state(raw_angles: [f64; 4]) -> DensityMatrix {
    let u = composite_unitary(raw_angles);
    let rotated = DensityMatrix::basis(0).matrix().conjugate_by(&u);
    zero_coherences(&DensityMatrix::new_unchecked(rotated))
}

pub fn writing_distance(raw_angles: [f64; 4], target: &DensityMatrix) -> f64 {
    trace_distance(&written_state(raw_angles), target)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Stop as soon as the distance drops below this.
    pub threshold: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            threshold: CERTIFICATION_THRESHOLD,
            initial_step: 0.25,
            min_step: 1e-8,
            max_evaluations: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub angles: PulseAngles,
    pub distance: f64,
    pub evaluations: usize,
}

/// Coordinate descent with a halving step on the trace distance between
/// the written state and `target`.
///
/// The two `theta_x` angles are searched first (they alone reach every
/// product target); all four are opened up only if that stalls. Coordinates
/// are visited in fixed order.
pub fn refine_numeric(initial: &PulseAngles, target: &DensityMatrix, options: RefineOptions) -> Result<Refinement> {
    if !target.is_diagonal() {
        return Err(Error::Domain("refinement target must be diagonal".into()));
    }
    let mut x = initial.as_array();
    let mut best = writing_distance(x, target);
    let mut evaluations = 1;

    for coordinates in [&[0usize, 2][..], &[0, 1, 2, 3][..]] {
        let mut step = options.initial_step;
        while best >= options.threshold && step >= options.min_step && evaluations < options.max_evaluations {
            let mut improved = false;
            for &i in coordinates {
                for sign in [1.0, -1.0] {
                    let mut candidate = x;
                    candidate[i] += sign * step;
                    let d = writing_distance(candidate, target);
                    evaluations += 1;
                    if d < best {
                        best = d;
                        x = candidate;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }

    if best >= options.threshold {
        return Err(Error::RefinementFailed {
            best_distance: best,
            threshold: options.threshold,
        });
    }
    Ok(Refinement {
        angles: PulseAngles::canonical(x)?,
        distance: best,
        evaluations,
    })
}

/// Maps one converged solution to certified pulse angles.
pub(crate) fn map_solution(
    model: &MaterialModel,
    temperature: f64,
    b0: f64,
    solution: SelfConsistentResult,
    tag: BranchTag,
) -> Result<AngleMapEntry> {
    let target = thermal_density_matrix(model, solution.b_eff, temperature)?;
    let analytic = invert_populations(target.populations()).ok();
    let (angles, achieved_distance, method) = match analytic {
        Some(a) => {
            let d = writing_distance(a.as_array(), &target);
            if d < CERTIFICATION_THRESHOLD {
                (a, d, MapMethod::Analytic)
            } else {
                refine_or_fail(&a, &target, temperature)?
            }
        }
        None => refine_or_fail(&PulseAngles::ZERO, &target, temperature)?,
    };
    Ok(AngleMapEntry {
        temperature,
        b0,
        m: solution.m,
        angles,
        achieved_distance,
        method,
        solution,
        tag,
    })
}

fn refine_or_fail(
    start: &PulseAngles,
    target: &DensityMatrix,
    temperature: f64,
) -> Result<(PulseAngles, f64, MapMethod)> {
    match refine_numeric(start, target, RefineOptions::default()) {
        Ok(r) => Ok((r.angles, r.distance, MapMethod::Refined)),
        Err(Error::RefinementFailed { best_distance, .. }) => Err(Error::Certification {
            temperature,
            best_distance,
        }),
        Err(e) => Err(e),
    }
}

/// One certified entry per grid temperature, in sweep order, following the
/// branch the sweep in `direction` tracks.
pub fn build_angle_table(
    model: &MaterialModel,
    grid: &[f64],
    b0: f64,
    direction: SweepDirection,
) -> Result<Vec<AngleMapEntry>> {
    let sweep = sweep_temperature(model, grid, b0, direction, direction.default_seed())?;
    sweep
        .points
        .iter()
        .map(|p| map_solution(model, p.temperature, b0, p.result, p.tag))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{boltzmann_populations, pulse_populations};
    use std::f64::consts::PI;

    fn diag(p: [f64; 4]) -> DensityMatrix {
        DensityMatrix::from_populations(p).unwrap()
    }

    #[test]
    fn invert_examples() {
        let a = invert_populations([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(a.as_array(), [0.0; 4]);
        let a = invert_populations([0.25; 4]).unwrap();
        assert!((a.theta_x_a() - PI / 2.0).abs() < 1e-15);
        assert!((a.theta_x_b() - PI / 2.0).abs() < 1e-15);
        assert_eq!(a.theta_y_a(), 0.0);
        assert_eq!(a.theta_y_b(), 0.0);
    }

    #[test]
    fn invert_boltzmann_tenth() {
        let p = boltzmann_populations(0.1);
        let a = invert_populations(p).unwrap();
        let c_a = a.theta_x_a().cos();
        let c_b = a.theta_x_b().cos();
        assert!((c_a - 2.0 * (p[0] + p[1]) + 1.0).abs() < 1e-15);
        assert!((c_a - 0.099_668).abs() < 1e-6);
        assert!((c_b - 0.049_959).abs() < 1e-6);
        for (x, y) in pulse_populations(a.as_array()).iter().zip(p) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn invert_rejects_entangled_populations() {
        assert!(matches!(
            invert_populations([0.5, 0.0, 0.0, 0.5]),
            Err(Error::NotProductState(_))
        ));
        assert!(matches!(
            invert_populations([0.5, 0.5, 0.5, 0.0]),
            Err(Error::InvalidPopulations(_))
        ));
        assert!(invert_populations([1.1, -0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn refine_from_exact_returns_immediately() {
        let target = diag(boltzmann_populations(0.1));
        let start = invert_populations(target.populations()).unwrap();
        let r = refine_numeric(&start, &target, RefineOptions::default()).unwrap();
        assert_eq!(r.evaluations, 1);
        assert!(r.distance < 1e-12);
    }

    #[test]
    fn refine_from_perturbed_start() {
        let target = diag(boltzmann_populations(0.1));
        let exact = invert_populations(target.populations()).unwrap().as_array();
        let start = PulseAngles::canonical([exact[0] + 0.3, 0.3, exact[2] - 0.3, 0.3]).unwrap();
        let r = refine_numeric(&start, &target, RefineOptions::default()).unwrap();
        assert!(r.distance < CERTIFICATION_THRESHOLD);
        assert!((r.distance - writing_distance(r.angles.as_array(), &target)).abs() < 1e-15);
    }

    #[test]
    fn refine_to_maximally_mixed() {
        let target = DensityMatrix::maximally_mixed();
        let r = refine_numeric(&PulseAngles::ZERO, &target, RefineOptions::default()).unwrap();
        let [xa, ya, xb, yb] = r.angles.as_array();
        assert_eq!((ya, yb), (0.0, 0.0));
        assert!((xa - PI / 2.0).abs() < 2e-3);
        assert!((xb - PI / 2.0).abs() < 2e-3);
        let tight = RefineOptions {
            threshold: 1e-9,
            ..RefineOptions::default()
        };
        let r = refine_numeric(&PulseAngles::ZERO, &target, tight).unwrap();
        assert!((r.angles.theta_x_a() - PI / 2.0).abs() < 1e-8);
        assert!((r.angles.theta_x_b() - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn refine_reports_failure() {
        let target = DensityMatrix::maximally_mixed();
        let opts = RefineOptions {
            max_evaluations: 3,
            ..RefineOptions::default()
        };
        assert!(matches!(
            refine_numeric(&PulseAngles::ZERO, &target, opts),
            Err(Error::RefinementFailed { .. })
        ));
        let bell_like = DensityMatrix::from_populations([0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(refine_numeric(&PulseAngles::ZERO, &bell_like, RefineOptions::default()).is_err());
    }

    #[test]
    fn target_state_examples() {
        let model = MaterialModel::default_second_order();
        let tc = model.critical_temperature().unwrap();
        let hot = target_state(&model, 10.0 * tc, 0.0, 0.5).unwrap();
        assert!(trace_distance(&hot, &DensityMatrix::maximally_mixed()) < 1e-12);
        assert_eq!(target_state(&model, 0.0, 0.0, 0.5).unwrap(), DensityMatrix::basis(0));
        let half = target_state(&model, 0.5 * tc, 0.0, 0.5).unwrap();
        let oracle = boltzmann_populations(1.2 * 0.917_515_177_611_44 / 0.5);
        for (x, y) in half.populations().iter().zip(oracle) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn angle_table_high_temperature_limit() {
        let model = MaterialModel::default_second_order();
        let tc = model.critical_temperature().unwrap();
        let grid = [5.0 * tc, 10.0 * tc];
        let table = build_angle_table(&model, &grid, 0.0, SweepDirection::Up).unwrap();
        for e in table {
            let [xa, ya, xb, yb] = e.angles.as_array();
            assert!((xa - PI / 2.0).abs() < 1e-9 && (xb - PI / 2.0).abs() < 1e-9);
            assert_eq!((ya, yb), (0.0, 0.0));
            assert_eq!(e.method, MapMethod::Analytic);
        }
    }
}
