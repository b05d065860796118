use serde::{Deserialize, Serialize};

use super::brillouin::Spin;
use crate::constants::{AVOGADRO, BOHR_MAGNETON, BOLTZMANN};
use crate::error::{Error, Result};

/// How the exchange coupling of a [`MaterialModel`] was specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Exchange energy `J_ex` in joules; `lambda` follows from `g` and `z`.
    Exchange { j_ex: f64 },
    /// Mean-field parameter `lambda` in T / (J/T), given directly.
    Lambda { lambda: f64 },
}

/// Unit system in which a `lambda' / lambda` ratio is quoted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicRatioUnits {
    /// Magnetization per mole in SI (J/T/mol).
    #[default]
    Molar,
    /// Magnetization in units of the saturation moment `g mu_B S`.
    Reduced,
}

/// Mean-field ferromagnet: `B_eff = B0 + lambda M + lambda' M^3`, with `M`
/// the moment per ion in J/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub spin: Spin,
    pub g: f64,
    pub z: u32,
    pub coupling: Coupling,
    /// Cubic coefficient in T / (J/T)^3.
    pub lambda_prime: f64,
}

impl MaterialModel {
    pub fn from_exchange(spin: Spin, g: f64, z: u32, j_ex: f64) -> Result<Self> {
        let model = MaterialModel {
            spin,
            g,
            z,
            coupling: Coupling::Exchange { j_ex },
            lambda_prime: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_lambda(spin: Spin, g: f64, z: u32, lambda: f64) -> Result<Self> {
        let model = MaterialModel {
            spin,
            g,
            z,
            coupling: Coupling::Lambda { lambda },
            lambda_prime: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    /// S = 3/2, g = 2, z = 6 with `J_ex = (83/15) k_B`, which puts `T_c` at 83 K.
    pub fn default_second_order() -> Self {
        MaterialModel::from_exchange(Spin::THREE_HALVES, 2.0, 6, 83.0 / 15.0 * BOLTZMANN)
            .expect("default parameters are valid")
    }

    pub fn with_lambda_prime(mut self, lambda_prime: f64) -> Result<Self> {
        self.lambda_prime = lambda_prime;
        self.validate()?;
        Ok(self)
    }

    /// Sets `lambda'` from a ratio `lambda'/lambda` quoted in `units`.
    pub fn with_cubic_ratio(self, ratio: f64, units: CubicRatioUnits) -> Result<Self> {
        if !ratio.is_finite() {
            return Err(Error::InvalidModel {
                field: "lambda_prime_ratio",
                reason: format!("must be finite, got {ratio}"),
            });
        }
        let lambda = self.lambda();
        let lambda_prime = match units {
            CubicRatioUnits::Molar => ratio * lambda * AVOGADRO * AVOGADRO,
            CubicRatioUnits::Reduced => ratio * lambda / self.saturation_moment().powi(2),
        };
        self.with_lambda_prime(lambda_prime)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidModel {
                field: "g",
                reason: format!("Lande factor must be positive, got {}", self.g),
            });
        }
        if self.z == 0 {
            return Err(Error::InvalidModel {
                field: "z",
                reason: "neighbor count must be at least 1".into(),
            });
        }
        match self.coupling {
            Coupling::Exchange { j_ex } if !j_ex.is_finite() => {
                return Err(Error::InvalidModel {
                    field: "j_ex",
                    reason: format!("must be finite, got {j_ex}"),
                })
            }
            Coupling::Lambda { lambda } if !lambda.is_finite() => {
                return Err(Error::InvalidModel {
                    field: "lambda",
                    reason: format!("must be finite, got {lambda}"),
                })
            }
            _ => {}
        }
        if !self.lambda_prime.is_finite() {
            return Err(Error::InvalidModel {
                field: "lambda_prime",
                reason: format!("must be finite, got {}", self.lambda_prime),
            });
        }
        Ok(())
    }

    /// Mean-field parameter, T / (J/T).
    pub fn lambda(&self) -> f64 {
        match self.coupling {
            Coupling::Exchange { j_ex } => lambda_from_exchange(self.g, self.z, j_ex),
            Coupling::Lambda { lambda } => lambda,
        }
    }

    /// `g = 1` or `J_ex = 0` leave no exchange field at all.
    pub fn is_degenerate(&self) -> bool {
        self.lambda() == 0.0
    }

    pub fn is_first_order(&self) -> bool {
        self.lambda_prime != 0.0
    }

    /// `g mu_B S`, J/T.
    pub fn saturation_moment(&self) -> f64 {
        self.g * BOHR_MAGNETON * self.spin.value()
    }

    /// `T_c = g^2 mu_B^2 S (S + 1) lambda / (3 k_B)`.
    ///
    /// This is where the `m = 0` solution loses stability; the cubic term
    /// does not shift it.
    pub fn critical_temperature(&self) -> Result<f64> {
        let lambda = self.lambda();
        if lambda <= 0.0 {
            return Err(Error::Domain(format!(
                "no ordering for lambda = {lambda:e} (needs lambda > 0)"
            )));
        }
        let s = self.spin.value();
        Ok((self.g * BOHR_MAGNETON).powi(2) * s * (s + 1.0) * lambda / (3.0 * BOLTZMANN))
    }

    /// `B0 + lambda M + lambda' M^3`, tesla.
    pub fn effective_field(&self, magnetization: f64, b0: f64) -> f64 {
        b0 + self.lambda() * magnetization + self.lambda_prime * magnetization.powi(3)
    }

    /// Field coefficients in kelvin such that `y = (a0 + a1 m + a3 m^3) / T`
    /// for reduced magnetization `m`.
    pub(crate) fn reduced_field(&self, b0: f64) -> ReducedField {
        let zeeman = self.g * BOHR_MAGNETON / BOLTZMANN;
        let ms = self.saturation_moment();
        ReducedField {
            a0: zeeman * b0,
            a1: zeeman * self.lambda() * ms,
            a3: zeeman * self.lambda_prime * ms.powi(3),
        }
    }
}

/// `lambda = 2 (g - 1)^2 z J_ex / (g^2 mu_B^2)`.
pub fn lambda_from_exchange(g: f64, z: u32, j_ex: f64) -> f64 {
    2.0 * (g - 1.0).powi(2) * f64::from(z) * j_ex / (g * g * BOHR_MAGNETON * BOHR_MAGNETON)
}

/// Kelvin-valued coefficients of the reduced Brillouin argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ReducedField {
    pub a0: f64,
    pub a1: f64,
    pub a3: f64,
}

impl ReducedField {
    /// `T * y(m)`, i.e. `g mu_B B_eff(m) / k_B`.
    pub fn energy(&self, m: f64) -> f64 {
        self.a0 + self.a1 * m + self.a3 * m * m * m
    }

    pub fn energy_slope(&self, m: f64) -> f64 {
        self.a1 + 3.0 * self.a3 * m * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(j_ex: f64) -> MaterialModel {
        MaterialModel::from_exchange(Spin::THREE_HALVES, 2.0, 6, j_ex).unwrap()
    }

    #[test]
    fn lambda_is_linear_in_exchange() {
        let a = model(1e-22).lambda();
        let b = model(2e-22).lambda();
        assert!((b / a - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_direct_substitution() {
        let lambda = lambda_from_exchange(2.0, 6, BOLTZMANN);
        let expected = 3.0 * BOLTZMANN / (BOHR_MAGNETON * BOHR_MAGNETON);
        assert!((lambda / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn g_equal_one_is_degenerate() {
        let m = MaterialModel::from_exchange(Spin::THREE_HALVES, 1.0, 6, 1e-21).unwrap();
        assert_eq!(m.lambda(), 0.0);
        assert!(m.is_degenerate());
        assert!(matches!(m.critical_temperature(), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_temperature_calibration() {
        // T_c = 2 S(S+1) (g-1)^2 z J_ex / (3 k_B) = 15 J_ex / k_B for S = 3/2, g = 2, z = 6.
        let tc = model(83.0 / 15.0 * BOLTZMANN).critical_temperature().unwrap();
        assert!((tc - 83.0).abs() < 1e-12, "{tc}");
        assert!((MaterialModel::default_second_order().critical_temperature().unwrap() - 83.0).abs() < 1e-12);
    }

    #[test]
    fn critical_temperature_linear_in_lambda() {
        let a = MaterialModel::from_lambda(Spin::THREE_HALVES, 2.0, 6, 1e45).unwrap();
        let b = MaterialModel::from_lambda(Spin::THREE_HALVES, 2.0, 6, 2e45).unwrap();
        let ratio = b.critical_temperature().unwrap() / a.critical_temperature().unwrap();
        assert!((ratio - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spin_half_critical_temperature() {
        let lambda = 1e46;
        let m = MaterialModel::from_lambda(Spin::HALF, 2.0, 6, lambda).unwrap();
        let expected = BOHR_MAGNETON * BOHR_MAGNETON * lambda / BOLTZMANN;
        assert!((m.critical_temperature().unwrap() / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_lambda_has_no_ordering() {
        let m = MaterialModel::from_lambda(Spin::HALF, 2.0, 6, -1.0).unwrap();
        assert!(m.critical_temperature().is_err());
    }

    #[test]
    fn effective_field_examples() {
        let m = MaterialModel::default_second_order();
        assert_eq!(m.effective_field(0.0, 6.0), 6.0);
        let mag = 0.4 * m.saturation_moment();
        assert_eq!(m.effective_field(mag, 1.5), 1.5 + m.lambda() * mag);
        let first = m.with_cubic_ratio(0.01, CubicRatioUnits::Molar).unwrap();
        assert_eq!(first.effective_field(-mag, 0.0), -first.effective_field(mag, 0.0));
    }

    #[test]
    fn reduced_field_matches_si() {
        let m = MaterialModel::default_second_order()
            .with_cubic_ratio(0.01, CubicRatioUnits::Molar)
            .unwrap();
        let red = m.reduced_field(3.0);
        for mr in [-0.7, 0.0, 0.3, 1.0] {
            let b = m.effective_field(mr * m.saturation_moment(), 3.0);
            let si = m.g * BOHR_MAGNETON * b / BOLTZMANN;
            assert!((red.energy(mr) - si).abs() < 1e-12 * si.abs().max(1.0));
        }
        let tc = m.critical_temperature().unwrap();
        assert!((red.a1 - 3.0 * tc / 2.5).abs() < 1e-12);
    }

    #[test]
    fn cubic_ratio_units() {
        let base = MaterialModel::default_second_order();
        let reduced = base.with_cubic_ratio(0.01, CubicRatioUnits::Reduced).unwrap();
        let r = reduced.reduced_field(0.0);
        assert!((r.a3 / r.a1 - 0.01).abs() < 1e-15);
        let molar = base.with_cubic_ratio(0.01, CubicRatioUnits::Molar).unwrap();
        let r = molar.reduced_field(0.0);
        let molar_sat = AVOGADRO * base.saturation_moment();
        assert!((r.a3 / r.a1 - 0.01 * molar_sat * molar_sat).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(MaterialModel::from_exchange(Spin::HALF, 0.0, 6, 1.0).is_err());
        assert!(MaterialModel::from_exchange(Spin::HALF, 2.0, 0, 1.0).is_err());
        assert!(MaterialModel::from_exchange(Spin::HALF, 2.0, 6, f64::NAN).is_err());
        assert!(MaterialModel::default_second_order()
            .with_lambda_prime(f64::INFINITY)
            .is_err());
    }
}
