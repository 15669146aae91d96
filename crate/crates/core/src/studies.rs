//! Convergence studies on manufactured problems and era summaries of
//! model scenarios.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::{integrate, SignConvention};
use crate::manufactured::ReferenceSolution;
use crate::model::{cp_rhs, EraPreset, COMPARTMENTS, COMPARTMENT_LABELS};
use crate::numerics::{build_grid, convergence_rate, discrete_l2_time_norm, sup_norm, Trajectory};

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub k: f64,
    /// L2-in-time norm of the exact solution.
    pub exact_norm: f64,
    /// L2-in-time norm of the computed solution.
    pub numeric_norm: f64,
    /// L2-in-time norm of the error.
    pub error_norm: f64,
    /// Observed order against the previous (coarser) row. `None` on the
    /// first row, and whenever either error is zero.
    pub rate: Option<f64>,
}

/// Runs the integrator on `problem` with `k = 2^-e` for each exponent and
/// tabulates norms and observed rates, coarse to fine.
pub fn run_convergence_study<P>(problem: &P, exponents: &[u32]) -> Result<Vec<ConvergenceRow>>
where
    P: ReferenceSolution + Sync,
{
    run_convergence_study_with_sign(problem, exponents, SignConvention::ConsistentPlus)
}

pub fn run_convergence_study_with_sign<P>(
    problem: &P,
    exponents: &[u32],
    sign: SignConvention,
) -> Result<Vec<ConvergenceRow>>
where
    P: ReferenceSolution + Sync,
{
    if exponents.is_empty() {
        return Err(Error::usage("no step exponents given"));
    }
    if exponents[0] < 1 || exponents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage(
            "step exponents must be >= 1 and strictly increasing",
        ));
    }
    if *exponents.last().unwrap() > 40 {
        return Err(Error::usage("step exponent too large"));
    }

    let norms: Vec<(f64, f64, f64, f64)> = exponents
        .par_iter()
        .map(|&e| norms_for_step(problem, 2f64.powi(-(e as i32)), sign))
        .collect::<Result<_>>()?;

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(norms.len());
    for (k, exact_norm, numeric_norm, error_norm) in norms {
        let rate = rows
            .last()
            .and_then(|prev| convergence_rate(prev.error_norm, error_norm).ok());
        rows.push(ConvergenceRow {
            k,
            exact_norm,
            numeric_norm,
            error_norm,
            rate,
        });
    }
    Ok(rows)
}

fn norms_for_step<P: ReferenceSolution>(
    problem: &P,
    k: f64,
    sign: SignConvention,
) -> Result<(f64, f64, f64, f64)> {
    let (t0, t_end) = problem.span();
    let grid = build_grid(t0, t_end, k)?;
    let traj = integrate(problem, &problem.initial_state(), &grid, sign)?;

    let mut exact_norms = Vec::with_capacity(grid.steps());
    let mut numeric_norms = Vec::with_capacity(grid.steps());
    let mut error_norms = Vec::with_capacity(grid.steps());
    for (t, state) in traj.samples().skip(1) {
        let exact = problem.exact(t);
        let diff: Vec<f64> = exact.iter().zip(state.iter()).map(|(a, b)| a - b).collect();
        exact_norms.push(sup_norm(&exact)?);
        numeric_norms.push(sup_norm(state)?);
        error_norms.push(sup_norm(&diff)?);
    }
    let k = grid.k();
    Ok((
        k,
        discrete_l2_time_norm(&exact_norms, k)?,
        discrete_l2_time_norm(&numeric_norms, k)?,
        discrete_l2_time_norm(&error_norms, k)?,
    ))
}

/// Corrupt population `y2 + y4` at every sample.
pub fn compute_corrupted_total(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.dim() != COMPARTMENTS {
        return Err(Error::usage(format!(
            "corrupted total needs a {COMPARTMENTS}-compartment trajectory, got dimension {}",
            traj.dim()
        )));
    }
    Ok(traj.states.iter().map(|s| s[1] + s[3]).collect())
}

/// Averages of one compartment over each era and over the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct EraSummaryRow {
    pub compartment: &'static str,
    pub era_averages: Vec<f64>,
    pub overall_average: f64,
    /// `overall_average / N * 100`.
    pub share_percent: f64,
}

impl EraSummaryRow {
    /// Share rounded half away from zero to one decimal, as displayed.
    pub fn display_share(&self) -> f64 {
        (self.share_percent * 10.0).round() / 10.0
    }
}

/// Sample means of each compartment over the eras `[b_j, b_{j+1})`, the
/// last era closed on the right.
pub fn era_summary(traj: &Trajectory, boundaries: &[f64], n: f64) -> Result<Vec<EraSummaryRow>> {
    if traj.dim() != COMPARTMENTS {
        return Err(Error::usage(format!(
            "era summary needs a {COMPARTMENTS}-compartment trajectory"
        )));
    }
    if !(n > 0.0) {
        return Err(Error::usage(format!(
            "population size {n} must be positive"
        )));
    }
    if boundaries.len() < 2 || boundaries.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::usage(
            "era boundaries need at least two strictly increasing values",
        ));
    }
    let grid = &traj.grid;
    // grid times carry rounding from t0 + n k; snap within a small fraction of k
    let slack = 1e-6 * grid.k();
    let (first, last) = (boundaries[0], *boundaries.last().unwrap());
    if (first - grid.t0()).abs() > slack || (last - grid.t_end()).abs() > slack {
        return Err(Error::usage(format!(
            "era boundaries [{first}, {last}] do not match the trajectory span [{}, {}]",
            grid.t0(),
            grid.t_end()
        )));
    }

    let eras = boundaries.len() - 1;
    let mut sums = vec![[0.0; COMPARTMENTS]; eras];
    let mut counts = vec![0usize; eras];
    let mut overall = [0.0; COMPARTMENTS];
    for (t, state) in traj.samples() {
        // last era index whose left boundary is <= t
        let era = boundaries[1..eras]
            .iter()
            .take_while(|&&b| t >= b - slack)
            .count();
        counts[era] += 1;
        for i in 0..COMPARTMENTS {
            sums[era][i] += state[i];
            overall[i] += state[i];
        }
    }
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::usage(format!(
            "era [{}, {}) contains no grid samples",
            boundaries[j],
            boundaries[j + 1]
        )));
    }
    let total = traj.states.len() as f64;
    Ok((0..COMPARTMENTS)
        .map(|i| {
            let overall_average = overall[i] / total;
            EraSummaryRow {
                compartment: COMPARTMENT_LABELS[i],
                era_averages: (0..eras).map(|j| sums[j][i] / counts[j] as f64).collect(),
                overall_average,
                share_percent: overall_average / n * 100.0,
            }
        })
        .collect())
}

/// Trajectory and era summary of one preset run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub trajectory: Trajectory,
    pub summary: Vec<EraSummaryRow>,
}

impl ScenarioRun {
    pub fn negativity(&self) -> bool {
        self.trajectory.negativity_flag
    }
}

/// Integrates the model for `preset` over its grid and summarises it by era.
/// A diverged run is returned as [`Error::Blowup`].
pub fn run_scenario(preset: &EraPreset, sign: SignConvention) -> Result<ScenarioRun> {
    let field = cp_rhs(preset.params)?;
    let grid = build_grid(preset.t0, preset.t_end, preset.k)?;
    let trajectory = integrate(&field, &preset.y0, &grid, sign)?;
    let summary = era_summary(&trajectory, &preset.era_boundaries, preset.params.n)?;
    Ok(ScenarioRun {
        trajectory,
        summary,
    })
}
