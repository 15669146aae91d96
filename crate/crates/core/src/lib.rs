//! Second-order explicit integration of nonlinear ODE systems by three
//! chained two-stage substeps, applied to a five-compartment
//! corruption-poverty model.
//!
//! - [`numerics`]: state vectors, time grids, discrete norms, observed order
//! - [`integrator`]: the scheme, its composed single-update form, and
//!   zero-stability roots
//! - [`model`]: the compartment model and the historical presets
//! - [`manufactured`]: verification problems with exact solutions
//! - [`studies`]: convergence tables and era summaries
//! - [`config`], [`report`]: run configuration files and CSV output

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod integrator;
pub mod manufactured;
pub mod model;
pub mod numerics;
pub mod report;
pub mod studies;

pub use config::{parse_config, ConfigError, RunConfig};
pub use error::{Blowup, Error, Result};
pub use integrator::{
    advance_one_step, composed_step, heun_substep, integrate, zero_stability_root_moduli,
    zero_stability_roots, RhsField, SignConvention, StageConstants,
};
pub use manufactured::{example1, example2, ManufacturedProblem, ReferenceSolution};
pub use model::{
    conservation_residual, cp_rhs, effective_contact_rates, preset, CpParams, CpRhs, EraPreset,
};
pub use numerics::{
    build_grid, convergence_rate, discrete_l2_time_norm, sup_norm, StateVector, TimeGrid,
    Trajectory,
};
pub use studies::{
    compute_corrupted_total, era_summary, run_convergence_study, run_convergence_study_with_sign,
    run_scenario, ConvergenceRow, EraSummaryRow, ScenarioRun,
};
