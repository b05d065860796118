//! Mean-field free energy whose stationary points are the self-consistent
//! solutions.

use super::brillouin::{brillouin_unchecked, log_partition};
use super::model::MaterialModel;
use crate::constants::{BOHR_MAGNETON, BOLTZMANN};
use crate::error::{Error, Result};

fn check(temperature: f64, b0: f64, magnetization: f64) -> Result<()> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::Domain(format!(
            "free energy needs a finite T > 0, got {temperature}"
        )));
    }
    if !(b0.is_finite() && magnetization.is_finite()) {
        return Err(Error::Domain("field and magnetization must be finite".into()));
    }
    Ok(())
}

/// `F(M) = -k_B T ln Z(B_eff(M)) + lambda M^2 / 2 + 3 lambda' M^4 / 4`, joules per ion.
pub fn free_energy(model: &MaterialModel, temperature: f64, b0: f64, magnetization: f64) -> Result<f64> {
    check(temperature, b0, magnetization)?;
    let b_eff = model.effective_field(magnetization, b0);
    let y = model.g * BOHR_MAGNETON * b_eff / (BOLTZMANN * temperature);
    let m2 = magnetization * magnetization;
    Ok(-BOLTZMANN * temperature * log_partition(model.spin, y)
        + 0.5 * model.lambda() * m2
        + 0.75 * model.lambda_prime * m2 * m2)
}

/// `dF/dM = (lambda + 3 lambda' M^2) (M - M_para(B_eff))`, tesla.
pub fn free_energy_gradient(model: &MaterialModel, temperature: f64, b0: f64, magnetization: f64) -> Result<f64> {
    check(temperature, b0, magnetization)?;
    let b_eff = model.effective_field(magnetization, b0);
    let y = model.g * BOHR_MAGNETON * b_eff / (BOLTZMANN * temperature);
    let paramagnetic = model.saturation_moment() * brillouin_unchecked(model.spin, y);
    let stiffness = model.lambda() + 3.0 * model.lambda_prime * magnetization * magnetization;
    Ok(stiffness * (magnetization - paramagnetic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_field::{solve_self_consistent, CubicRatioUnits};

    fn central_difference(model: &MaterialModel, t: f64, b0: f64, mag: f64) -> f64 {
        let h = 1e-6 * model.saturation_moment();
        let plus = free_energy(model, t, b0, mag + h).unwrap();
        let minus = free_energy(model, t, b0, mag - h).unwrap();
        (plus - minus) / (2.0 * h)
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let model = MaterialModel::default_second_order()
            .with_cubic_ratio(0.01, CubicRatioUnits::Molar)
            .unwrap();
        let ms = model.saturation_moment();
        for &(t, b0, m) in &[
            (40.0, 0.0, 0.3),
            (120.0, 5.0, -0.8),
            (200.0, 0.0, 0.95),
            (10.0, 1.0, 0.1),
        ] {
            let analytic = free_energy_gradient(&model, t, b0, m * ms).unwrap();
            let fd = central_difference(&model, t, b0, m * ms);
            assert!((analytic - fd).abs() <= 1e-6 * analytic.abs(), "{analytic} vs {fd}");
        }
    }

    #[test]
    fn stationary_at_self_consistent_solution() {
        let model = MaterialModel::default_second_order();
        let tc = model.critical_temperature().unwrap();
        let r = solve_self_consistent(&model, 0.6 * tc, 0.0, 1.0).unwrap();
        let grad = free_energy_gradient(&model, 0.6 * tc, 0.0, r.magnetization).unwrap();
        let fd = central_difference(&model, 0.6 * tc, 0.0, r.magnetization);
        // gradient scale: lambda * M_s
        let scale = model.lambda() * model.saturation_moment();
        assert!(grad.abs() < 1e-9 * scale);
        assert!(fd.abs() < 1e-6 * scale);
    }

    #[test]
    fn paramagnet_minimum_above_tc() {
        let model = MaterialModel::default_second_order();
        let tc = model.critical_temperature().unwrap();
        let ms = model.saturation_moment();
        let f0 = free_energy(&model, 1.5 * tc, 0.0, 0.0).unwrap();
        for i in 1..=100 {
            let m = i as f64 / 100.0;
            assert!(free_energy(&model, 1.5 * tc, 0.0, m * ms).unwrap() > f0);
            assert!(free_energy(&model, 1.5 * tc, 0.0, -m * ms).unwrap() > f0);
        }
    }

    #[test]
    fn rejects_zero_temperature() {
        let model = MaterialModel::default_second_order();
        assert!(matches!(free_energy(&model, 0.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(free_energy_gradient(&model, -1.0, 0.0, 0.0).is_err());
    }
}
