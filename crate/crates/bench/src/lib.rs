//! Fixtures shared by the criterion benchmarks.

use cpode::{build_grid, cp_rhs, preset, CpRhs, StateVector, TimeGrid};

/// Model field, initial state, and one-year grid for a preset.
pub fn model_fixture(label: &str, years: f64) -> (CpRhs, StateVector, TimeGrid) {
    let p = preset(label).expect("known preset");
    let field = cp_rhs(p.params).expect("valid preset parameters");
    let grid = build_grid(p.t0, p.t0 + years, p.k).expect("valid horizon");
    (field, p.y0, grid)
}
