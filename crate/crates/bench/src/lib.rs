//! Shared fixtures for the criterion benches.

use spinwrite::{CubicRatioUnits, MaterialModel};

pub fn second_order() -> MaterialModel {
    MaterialModel::default_second_order()
}

pub fn first_order() -> MaterialModel {
    MaterialModel::default_second_order()
        .with_cubic_ratio(0.01, CubicRatioUnits::Molar)
        .expect("valid ratio")
}

/// `n` points uniformly on `[0, max_reduced] * T_c`.
pub fn reduced_grid(model: &MaterialModel, max_reduced: f64, n: usize) -> Vec<f64> {
    let tc = model.critical_temperature().expect("ordered model");
    (0..n).map(|i| max_reduced * tc * i as f64 / (n - 1) as f64).collect()
}
