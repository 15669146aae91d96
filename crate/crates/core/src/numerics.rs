//! State vectors, uniform time grids, and the discrete norms used to
//! measure errors and observed convergence order.

use std::ops::Deref;

use crate::error::{Error, Result};

/// A finite, fixed-length vector of `f64` values.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    /// Builds a state vector, rejecting empty input and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::usage("state vector must be nonempty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::usage(format!(
                "state vector entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(StateVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        StateVector(vec![0.0; dim])
    }

    /// Wraps values already known to be finite.
    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        StateVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        StateVector::new(values)
    }
}

/// Uniform partition `t_n = t0 + n k`, `n = 0..=M`, of `[t0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t_end: f64,
    steps: usize,
    k: f64,
}

impl TimeGrid {
    /// Grid with exactly `steps` intervals.
    pub fn with_steps(t0: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && t_end.is_finite()) {
            return Err(Error::usage("grid endpoints must be finite"));
        }
        if t_end <= t0 {
            return Err(Error::usage(format!(
                "grid end {t_end} must exceed start {t0}"
            )));
        }
        if steps == 0 {
            return Err(Error::usage("grid needs at least one step"));
        }
        Ok(TimeGrid {
            t0,
            t_end,
            steps,
            k: (t_end - t0) / steps as f64,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of intervals `M`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step length `k = (T - t0) / M`.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Time of grid point `n`. The last point is pinned to `T`.
    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps {
            self.t_end
        } else {
            self.t0 + n as f64 * self.k
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|n| self.time(n))
    }
}

/// Builds a grid over `[t0, T]` whose step is as close as possible to
/// `k_request` while landing exactly on `T`.
pub fn build_grid(t0: f64, t_end: f64, k_request: f64) -> Result<TimeGrid> {
    if !(k_request > 0.0 && k_request.is_finite()) {
        return Err(Error::usage(format!(
            "requested step {k_request} must be positive and finite"
        )));
    }
    if t_end <= t0 {
        return Err(Error::usage(format!(
            "grid end {t_end} must exceed start {t0}"
        )));
    }
    let steps = ((t_end - t0) / k_request).round().max(1.0);
    if steps > usize::MAX as f64 / 2.0 {
        return Err(Error::usage("requested step is too small"));
    }
    TimeGrid::with_steps(t0, t_end, steps as usize)
}

/// Grid samples of an integration, with a flag raised when any entry is
/// negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<StateVector>,
    pub negativity_flag: bool,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, states: Vec<StateVector>) -> Result<Self> {
        if states.len() != grid.steps() + 1 {
            return Err(Error::usage(format!(
                "trajectory needs {} states, got {}",
                grid.steps() + 1,
                states.len()
            )));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::usage("trajectory states differ in dimension"));
        }
        let negativity_flag = states.iter().any(|s| s.iter().any(|&v| v < 0.0));
        Ok(Trajectory {
            grid,
            states,
            negativity_flag,
        })
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `(t_n, Y^n)` pairs in grid order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, &StateVector)> + '_ {
        self.grid.times().zip(self.states.iter())
    }
}

/// Maximum absolute entry.
pub fn sup_norm(y: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::usage("sup norm of an empty vector"));
    }
    Ok(y.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// `sqrt(k * sum_{n=1..M} v_n^2)` where `per_step_norms[n - 1] = v_n`.
///
/// The initial sample `n = 0` is not part of the sum; callers pass the
/// values for `n = 1..=M` only.
pub fn discrete_l2_time_norm(per_step_norms: &[f64], k: f64) -> Result<f64> {
    if per_step_norms.is_empty() {
        return Err(Error::usage("L2 time norm of an empty sequence"));
    }
    if !(k > 0.0) {
        return Err(Error::usage(format!("step {k} must be positive")));
    }
    let sum: f64 = per_step_norms.iter().map(|v| v * v).sum();
    Ok((k * sum).sqrt())
}

/// Observed order `log2(e_coarse / e_fine)` between step sizes `2k` and `k`.
pub fn convergence_rate(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::usage(format!(
            "convergence rate needs positive errors, got {e_coarse} and {e_fine}"
        )));
    }
    Ok((e_coarse / e_fine).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sup_norm_examples() {
        assert_eq!(sup_norm(&[0.0; 5]).unwrap(), 0.0);
        assert_eq!(sup_norm(&[1.0, -2.0, 3.0, -4.0, 5.0]).unwrap(), 5.0);
        assert!(sup_norm(&[]).is_err());
    }

    #[test]
    fn l2_time_norm_examples() {
        assert_eq!(discrete_l2_time_norm(&[3.0], 0.25).unwrap(), 1.5);
        // constant v over [0, 2] with M = 8
        let v = 0.7;
        let got = discrete_l2_time_norm(&[v; 8], 0.25).unwrap();
        assert!((got - v * 2.0_f64.sqrt()).abs() < 1e-15);
        assert!(discrete_l2_time_norm(&[], 0.1).is_err());
        assert!(discrete_l2_time_norm(&[1.0], 0.0).is_err());
    }

    #[test]
    fn convergence_rate_examples() {
        let r = convergence_rate(1.3296e-4, 3.3238e-5).unwrap();
        assert!((r - 2.0001).abs() < 5e-4, "{r}");
        assert_eq!(convergence_rate(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(convergence_rate(4.0 * 1.7e-3, 1.7e-3).unwrap(), 2.0);
        assert!(convergence_rate(0.0, 1.0).is_err());
        assert!(convergence_rate(1.0, -1.0).is_err());
    }

    #[test]
    fn build_grid_examples() {
        let g = build_grid(0.0, 1.0, 0.0625).unwrap();
        assert_eq!((g.steps(), g.k()), (16, 0.0625));

        let g = build_grid(1960.0, 1986.0, 1e-3).unwrap();
        assert_eq!(g.steps(), 26_000);
        assert!((g.k() - 1e-3).abs() < 1e-15);
        assert_eq!(g.time(26_000), 1986.0);

        let g = build_grid(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.steps(), 3);
        assert_eq!(g.k(), 1.0 / 3.0);

        // tiny horizons still get one step
        assert_eq!(build_grid(0.0, 0.1, 5.0).unwrap().steps(), 1);
        assert!(build_grid(1.0, 1.0, 0.1).is_err());
        assert!(build_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn state_vector_rejects_non_finite() {
        assert!(StateVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(StateVector::new(vec![f64::INFINITY]).is_err());
        assert!(StateVector::new(vec![]).is_err());
    }

    #[test]
    fn trajectory_flags_negative_entries() {
        let grid = TimeGrid::with_steps(0.0, 1.0, 1).unwrap();
        let s = |v: f64| StateVector::new(vec![1.0, v]).unwrap();
        assert!(
            !Trajectory::new(grid, vec![s(0.0), s(2.0)])
                .unwrap()
                .negativity_flag
        );
        assert!(
            Trajectory::new(grid, vec![s(0.0), s(-1e-300)])
                .unwrap()
                .negativity_flag
        );
        assert!(Trajectory::new(grid, vec![s(0.0)]).is_err());
    }

    fn vec5() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e6..1e6_f64, 5)
    }

    proptest! {
        #[test]
        fn sup_norm_matches_scan(y in vec5()) {
            let mut best = 0.0_f64;
            for v in &y {
                if v.abs() > best {
                    best = v.abs();
                }
            }
            prop_assert_eq!(sup_norm(&y).unwrap(), best);
        }

        #[test]
        fn sup_norm_homogeneous(y in vec5(), a in -1e3..1e3_f64) {
            let scaled: Vec<f64> = y.iter().map(|v| a * v).collect();
            let lhs = sup_norm(&scaled).unwrap();
            let rhs = a.abs() * sup_norm(&y).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-15 * rhs.max(1.0));
        }

        #[test]
        fn sup_norm_triangle(y in vec5(), z in vec5()) {
            let sum: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
            let lhs = sup_norm(&sum).unwrap();
            let rhs = sup_norm(&y).unwrap() + sup_norm(&z).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-15));
        }

        #[test]
        fn l2_norm_monotone(v in prop::collection::vec(0.0..10.0_f64, 1..40),
                            idx in any::<prop::sample::Index>(),
                            bump in 0.0..5.0_f64,
                            k in 1e-4..1.0_f64) {
            let mut w = v.clone();
            let i = idx.index(w.len());
            w[i] += bump;
            prop_assert!(discrete_l2_time_norm(&w, k).unwrap() >= discrete_l2_time_norm(&v, k).unwrap());
        }

        #[test]
        fn rates_telescope(a in 1e-12..1.0_f64, b in 1e-12..1.0_f64, c in 1e-12..1.0_f64) {
            let lhs = convergence_rate(a, b).unwrap() + convergence_rate(b, c).unwrap();
            let rhs = convergence_rate(a, c).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn grid_lands_on_end(t0 in -3000.0..3000.0_f64, span in 1e-3..100.0_f64, k in 1e-3..10.0_f64) {
            let t_end = t0 + span;
            prop_assume!(t_end > t0);
            let g = build_grid(t0, t_end, k).unwrap();
            prop_assert!(g.steps() >= 1);
            let reached = g.t0() + g.steps() as f64 * g.k();
            // t0 + M k rounds at the scale of the larger endpoint
            let ulp = t0.abs().max(t_end.abs()) * f64::EPSILON;
            prop_assert!((reached - t_end).abs() <= 2.0 * ulp);
            prop_assert_eq!(g.time(g.steps()), t_end);
        }
    }
}
