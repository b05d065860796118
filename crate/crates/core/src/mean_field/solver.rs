//! Self-consistent solution of `m = B_S(g mu_B B_eff(m) / k_B T)`.

use serde::{Deserialize, Serialize};

use super::brillouin::{brillouin_slope, brillouin_unchecked, Spin};
use super::model::{MaterialModel, ReducedField};
use crate::error::{Error, Result};

/// Convergence tolerance on `|m - rhs(m)|`.
pub const SOLVER_TOLERANCE: f64 = 1e-10;
/// Weight of the new iterate in the damped fixed-point map.
pub const DAMPING: f64 = 0.5;
pub const MAX_ITERATIONS: usize = 10_000;

const SCAN_STEP: f64 = 1e-4;
const POLISH_STEPS: usize = 8;
const POLISH_MAX_STEP: f64 = 1e-6;
/// Below this `|m|` a zero-field root is replaced by the exact root at 0
/// whenever 0 is not unstable.
const ZERO_SNAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// `T = 0` handled as saturation.
    Saturation,
    FixedPoint,
    /// Fixed-point stalled; the root was bracketed and bisected.
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistentResult {
    /// Reduced magnetization `M / (g mu_B S)`.
    pub m: f64,
    /// Magnetization per ion, J/T.
    pub magnetization: f64,
    /// Effective field at the solution, tesla.
    pub b_eff: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: SolveMethod,
}

/// The fixed-point problem at one `(T, B0)` in reduced variables.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FixedPointProblem {
    spin: Spin,
    field: ReducedField,
    temperature: f64,
}

impl FixedPointProblem {
    pub fn new(model: &MaterialModel, temperature: f64, b0: f64) -> Self {
        FixedPointProblem {
            spin: model.spin,
            field: model.reduced_field(b0),
            temperature,
        }
    }

    pub fn rhs(&self, m: f64) -> f64 {
        brillouin_unchecked(self.spin, self.field.energy(m) / self.temperature)
    }

    pub fn residual(&self, m: f64) -> f64 {
        m - self.rhs(m)
    }

    fn residual_slope(&self, m: f64) -> f64 {
        let y = self.field.energy(m) / self.temperature;
        1.0 - brillouin_slope(self.spin, y) * self.field.energy_slope(m) / self.temperature
    }
}

/// Solves the mean-field equation starting from `m_init`.
///
/// Damped fixed-point iteration converges to the stable root reached by
/// moving from `m_init` in the direction of `rhs(m) - m`; if it stalls the
/// same root is bracketed by a scan in that direction and bisected. A
/// result that still misses the tolerance is returned with
/// `converged = false`.
pub fn solve_self_consistent(
    model: &MaterialModel,
    temperature: f64,
    b0: f64,
    m_init: f64,
) -> Result<SelfConsistentResult> {
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be finite and >= 0, got {temperature}"
        )));
    }
    if !b0.is_finite() {
        return Err(Error::Domain(format!("external field must be finite, got {b0}")));
    }
    if !(m_init.is_finite() && m_init.abs() <= 1.0) {
        return Err(Error::Domain(format!(
            "initial magnetization must lie in [-1, 1], got {m_init}"
        )));
    }

    if temperature == 0.0 {
        let m = ground_state(&model.reduced_field(b0), m_init);
        return Ok(finish(model, b0, m, 0.0, 0, SolveMethod::Saturation));
    }

    let problem = FixedPointProblem::new(model, temperature, b0);
    let mut m = m_init;
    let mut iterations = 0;
    let mut residual = problem.residual(m).abs();
    while residual >= SOLVER_TOLERANCE && iterations < MAX_ITERATIONS {
        m += DAMPING * (problem.rhs(m) - m);
        iterations += 1;
        residual = problem.residual(m).abs();
    }

    let method = if residual < SOLVER_TOLERANCE {
        SolveMethod::FixedPoint
    } else {
        m = directional_root(&problem, m);
        SolveMethod::Bisection
    };
    m = polish(&problem, m);
    if problem.field.a0 == 0.0 && m != 0.0 && m.abs() < ZERO_SNAP && problem.residual_slope(0.0) >= 0.0 {
        m = 0.0;
    }
    let residual = problem.residual(m).abs();
    Ok(finish(model, b0, m, residual, iterations, method))
}

fn finish(
    model: &MaterialModel,
    b0: f64,
    m: f64,
    residual: f64,
    iterations: usize,
    method: SolveMethod,
) -> SelfConsistentResult {
    let magnetization = m * model.saturation_moment();
    SelfConsistentResult {
        m,
        magnetization,
        b_eff: model.effective_field(magnetization, b0),
        residual,
        iterations,
        converged: residual < SOLVER_TOLERANCE,
        method,
    }
}

/// `T = 0`: `m = +-1` when the effective field it produces has the same sign.
fn ground_state(field: &ReducedField, m_init: f64) -> f64 {
    let up = field.energy(1.0) > 0.0;
    let down = field.energy(-1.0) < 0.0;
    match (up, down) {
        (true, true) if m_init < 0.0 => -1.0,
        (true, _) => 1.0,
        (false, true) => -1.0,
        (false, false) => 0.0,
    }
}

/// First root of the residual met when walking from `start` in the
/// direction the damped map moves.
fn directional_root(problem: &FixedPointProblem, start: f64) -> f64 {
    let f0 = problem.residual(start);
    if f0 == 0.0 {
        return start;
    }
    let direction = if f0 < 0.0 { 1.0 } else { -1.0 };
    let mut lo = start;
    let mut f_lo = f0;
    loop {
        let next = (lo + direction * SCAN_STEP).clamp(-1.0, 1.0);
        let f_next = problem.residual(next);
        if f_next == 0.0 {
            return next;
        }
        if f_next.signum() != f_lo.signum() {
            return bisect(problem, lo, next);
        }
        if next == lo || next.abs() == 1.0 {
            // rhs never reaches +-1 at finite y, so this is unreachable unless
            // it rounded to exactly +-1; the boundary is then the root.
            return next;
        }
        lo = next;
        f_lo = f_next;
    }
}

fn bisect(problem: &FixedPointProblem, mut a: f64, mut b: f64) -> f64 {
    let mut fa = problem.residual(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = problem.residual(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    if problem.residual(a).abs() <= problem.residual(b).abs() {
        a
    } else {
        b
    }
}

/// A few guarded Newton steps; each must shrink the residual.
fn polish(problem: &FixedPointProblem, mut m: f64) -> f64 {
    let mut f = problem.residual(m);
    for _ in 0..POLISH_STEPS {
        if f == 0.0 {
            break;
        }
        let slope = problem.residual_slope(m);
        if !(slope.is_finite() && slope > 0.0) {
            break;
        }
        let step = (f / slope).clamp(-POLISH_MAX_STEP, POLISH_MAX_STEP);
        let candidate = (m - step).clamp(-1.0, 1.0);
        let f_candidate = problem.residual(candidate);
        if f_candidate.abs() >= f.abs() {
            break;
        }
        m = candidate;
        f = f_candidate;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_field::{CubicRatioUnits, MaterialModel};

    fn second_order() -> MaterialModel {
        MaterialModel::default_second_order()
    }

    /// Independent bisection on m - B_{3/2}(3 m T_c / ((S+1) T)), written
    /// with the closed-form Boltzmann sum.
    fn reduced_oracle(t: f64) -> f64 {
        let b = |y: f64| {
            let ms = [1.5, 0.5, -0.5, -1.5];
            let z: f64 = ms.iter().map(|m| (y * m).exp()).sum();
            ms.iter().map(|m| m * (y * m).exp()).sum::<f64>() / z / 1.5
        };
        let f = |m: f64| m - b(1.2 * m / t);
        let (mut lo, mut hi) = (1e-6, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn paramagnetic_above_tc() {
        let model = second_order();
        let tc = model.critical_temperature().unwrap();
        for m_init in [-1.0, -0.3, 0.0, 0.2, 1.0] {
            let r = solve_self_consistent(&model, 2.0 * tc, 0.0, m_init).unwrap();
            assert!(r.converged);
            assert!(r.m.abs() < 1e-12, "m_init {m_init} -> {}", r.m);
        }
    }

    #[test]
    fn saturates_at_low_temperature() {
        let model = second_order();
        let tc = model.critical_temperature().unwrap();
        let r = solve_self_consistent(&model, 1e-3 * tc, 0.0, 0.5).unwrap();
        assert!(r.converged);
        assert!((r.m - 1.0).abs() < 1e-12);
        let r = solve_self_consistent(&model, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(r.m, 1.0);
        assert_eq!(r.method, SolveMethod::Saturation);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn zero_temperature_cases() {
        let model = second_order();
        assert_eq!(solve_self_consistent(&model, 0.0, 0.0, -0.2).unwrap().m, -1.0);
        assert_eq!(solve_self_consistent(&model, 0.0, 0.0, 0.0).unwrap().m, 1.0);
        let para = MaterialModel::from_exchange(Spin::THREE_HALVES, 1.0, 6, 1e-21).unwrap();
        assert_eq!(solve_self_consistent(&para, 0.0, 0.0, 0.5).unwrap().m, 0.0);
        assert_eq!(solve_self_consistent(&para, 0.0, -2.0, 0.5).unwrap().m, -1.0);
    }

    #[test]
    fn half_tc_matches_oracle() {
        let model = second_order();
        let tc = model.critical_temperature().unwrap();
        let r = solve_self_consistent(&model, 0.5 * tc, 0.0, 0.5).unwrap();
        let oracle = reduced_oracle(0.5);
        assert!(r.converged);
        assert!((r.m - oracle).abs() < 1e-10, "{} vs {oracle}", r.m);
        assert!((r.m - 0.917_515_177_611_44).abs() < 1e-10);
    }

    #[test]
    fn reduced_oracle_agreement_across_ordered_branch() {
        let model = second_order();
        let tc = model.critical_temperature().unwrap();
        for t in [0.05, 0.3, 0.7, 0.9, 0.99] {
            let r = solve_self_consistent(&model, t * tc, 0.0, 1.0).unwrap();
            assert!(r.converged);
            assert!((r.m - reduced_oracle(t)).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn near_tc_uses_fallback_and_still_converges() {
        let model = second_order();
        let tc = model.critical_temperature().unwrap();
        let r = solve_self_consistent(&model, 0.9999 * tc, 0.0, 1.0).unwrap();
        assert!(r.converged);
        assert_eq!(r.method, SolveMethod::Bisection);
        assert!((r.m - reduced_oracle(0.9999)).abs() < 1e-9);
        let r = solve_self_consistent(&model, tc, 0.0, 0.5).unwrap();
        assert!(r.converged);
        assert!(r.m.abs() < 1e-4);
    }

    #[test]
    fn field_breaks_symmetry() {
        let model = second_order();
        let tc = model.critical_temperature().unwrap();
        let up = solve_self_consistent(&model, 2.0 * tc, 6.0, 0.0).unwrap();
        let down = solve_self_consistent(&model, 2.0 * tc, -6.0, 0.0).unwrap();
        assert!(up.m > 0.0);
        assert!((up.m + down.m).abs() < 1e-14);
        assert!((up.b_eff - model.effective_field(up.magnetization, 6.0)).abs() < 1e-12);
    }

    #[test]
    fn metastable_branch_follows_seed() {
        let model = second_order().with_cubic_ratio(0.01, CubicRatioUnits::Molar).unwrap();
        let tc = model.critical_temperature().unwrap();
        let ordered = solve_self_consistent(&model, 1.3 * tc, 0.0, 1.0).unwrap();
        let para = solve_self_consistent(&model, 1.3 * tc, 0.0, 1e-3).unwrap();
        assert!(ordered.converged && para.converged);
        assert!(ordered.m > 0.5);
        assert!(para.m.abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let model = second_order();
        assert!(solve_self_consistent(&model, -1.0, 0.0, 0.5).is_err());
        assert!(solve_self_consistent(&model, f64::NAN, 0.0, 0.5).is_err());
        assert!(solve_self_consistent(&model, 10.0, f64::INFINITY, 0.5).is_err());
        assert!(solve_self_consistent(&model, 10.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn converged_results_satisfy_fixed_point() {
        let model = second_order().with_cubic_ratio(0.01, CubicRatioUnits::Molar).unwrap();
        let tc = model.critical_temperature().unwrap();
        for i in 1..60 {
            let t = 0.05 * i as f64;
            for b0 in [0.0, 2.0, 20.0] {
                for seed in [1e-3, 0.5, 1.0] {
                    let r = solve_self_consistent(&model, t * tc, b0, seed).unwrap();
                    assert!(r.converged, "t={t} b0={b0} seed={seed}");
                    assert!(r.m.abs() <= 1.0);
                    let problem = FixedPointProblem::new(&model, t * tc, b0);
                    assert!(problem.residual(r.m).abs() < SOLVER_TOLERANCE);
                }
            }
        }
    }
}
