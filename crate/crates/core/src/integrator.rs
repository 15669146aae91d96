//! Three-substep second-order explicit scheme.
//!
//! One macro step of length `k` is three chained two-stage substeps of
//! length `h = k/3`, each of the form
//!
//! ```text
//! Y' = Y + s (h/2) [ F(t, Y) + F(t + h, Y + h F(t, Y)) ]
//! ```
//!
//! with `s = +1` for [`SignConvention::ConsistentPlus`]. The scheme needs
//! only the initial datum `Y^0 = y^0`.

use num_complex::Complex64;

use crate::error::{Blowup, Error, Result};
use crate::numerics::{StateVector, TimeGrid, Trajectory};

/// Right-hand side `F(t, y)` of an ODE system `dy/dt = F(t, y)`.
///
/// Implementations must be deterministic and free of side effects.
pub trait RhsField {
    fn dim(&self) -> usize;

    /// Writes `F(t, y)` into `dydt`. Both slices have length `dim()`.
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

impl<F: RhsField + ?Sized> RhsField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        (**self).eval(t, y, dydt)
    }
}

/// Sign in front of the `k/6` increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// `+k/6`, the sign consistent with the truncation analysis.
    #[default]
    ConsistentPlus,
    /// `-k/6` as typeset in the published formulas. Not convergent.
    PaperMinus,
}

impl SignConvention {
    pub fn factor(self) -> f64 {
        match self {
            SignConvention::ConsistentPlus => 1.0,
            SignConvention::PaperMinus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignConvention::ConsistentPlus => "plus",
            SignConvention::PaperMinus => "minus",
        }
    }
}

impl std::str::FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" => Ok(SignConvention::ConsistentPlus),
            "minus" => Ok(SignConvention::PaperMinus),
            other => Err(Error::usage(format!(
                "unknown sign convention {other:?} (expected plus or minus)"
            ))),
        }
    }
}

/// Weights and nodes of the two-stage substep,
/// `c1 F(t, y) + c2 F(t + q1 k, y + q2 k F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageConstants {
    pub c1: f64,
    pub c2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl StageConstants {
    pub const CHOSEN: StageConstants = StageConstants {
        c1: 0.5,
        c2: 0.5,
        q1: 1.0 / 3.0,
        q2: 1.0 / 3.0,
    };

    /// Residuals of `c1 + c2 = 1`, `6 c2 q1 = 1`, `6 c2 q2 = 1`.
    pub fn order_condition_residuals(&self) -> [f64; 3] {
        [
            1.0 - self.c1 - self.c2,
            1.0 - 6.0 * self.c2 * self.q1,
            1.0 - 6.0 * self.c2 * self.q2,
        ]
    }
}

/// Scratch buffers shared by the substep kernels.
struct Workspace {
    f0: Vec<f64>,
    predictor: Vec<f64>,
    f1: Vec<f64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Workspace {
            f0: vec![0.0; dim],
            predictor: vec![0.0; dim],
            f1: vec![0.0; dim],
        }
    }

    /// Evaluates both stages at `(t, y)`, leaving `F(t, y)` in `f0` and
    /// `F(t + h, y + h F(t, y))` in `f1`.
    fn stages<F: RhsField + ?Sized>(&mut self, f: &F, t: f64, y: &[f64], h: f64) -> Result<()> {
        f.eval(t, y, &mut self.f0);
        if self.f0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        for ((p, &yi), &fi) in self.predictor.iter_mut().zip(y).zip(&self.f0) {
            *p = yi + h * fi;
        }
        let t_pred = t + h;
        f.eval(t_pred, &self.predictor, &mut self.f1);
        if self.f1.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_pred });
        }
        Ok(())
    }
}

fn check_dims<F: RhsField + ?Sized>(f: &F, y: &[f64]) -> Result<()> {
    if f.dim() != y.len() {
        return Err(Error::usage(format!(
            "field has dimension {} but state has dimension {}",
            f.dim(),
            y.len()
        )));
    }
    Ok(())
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::usage(format!(
            "step {step} must be positive and finite"
        )));
    }
    Ok(())
}

fn ensure_finite(y: &[f64], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Start times of the three substeps of the macro step beginning at `t`.
fn substep_times(t: f64, h: f64) -> [f64; 3] {
    [t, t + h, t + 2.0 * h]
}

/// One two-stage substep of length `h`. Uses exactly two evaluations of `f`.
pub fn heun_substep<F: RhsField + ?Sized>(
    f: &F,
    t: f64,
    y: &StateVector,
    h: f64,
    sign: SignConvention,
) -> Result<StateVector> {
    check_dims(f, y)?;
    check_step(h)?;
    let mut ws = Workspace::new(y.dim());
    let mut out = y.to_vec();
    substep_in_place(f, t, &mut out, h, sign.factor() * (h / 2.0), &mut ws)?;
    Ok(StateVector::from_finite(out))
}

fn substep_in_place<F: RhsField + ?Sized>(
    f: &F,
    t: f64,
    y: &mut [f64],
    h: f64,
    weight: f64,
    ws: &mut Workspace,
) -> Result<()> {
    ws.stages(f, t, y, h)?;
    for ((yi, &a), &b) in y.iter_mut().zip(&ws.f0).zip(&ws.f1) {
        *yi += weight * (a + b);
    }
    ensure_finite(y, t + h)
}

fn advance_in_place<F: RhsField + ?Sized>(
    f: &F,
    t_n: f64,
    y: &mut [f64],
    k: f64,
    sign: SignConvention,
    ws: &mut Workspace,
) -> Result<()> {
    let h = k / 3.0;
    let weight = sign.factor() * (h / 2.0);
    for t in substep_times(t_n, h) {
        substep_in_place(f, t, y, h, weight, ws)?;
    }
    Ok(())
}

/// One macro step of length `k`: three chained substeps of length `k/3`
/// starting at `t_n`, `t_n + k/3`, `t_n + 2k/3`. Six evaluations of `f`.
pub fn advance_one_step<F: RhsField + ?Sized>(
    f: &F,
    t_n: f64,
    y: &StateVector,
    k: f64,
    sign: SignConvention,
) -> Result<StateVector> {
    check_dims(f, y)?;
    check_step(k)?;
    let mut ws = Workspace::new(y.dim());
    let mut out = y.to_vec();
    advance_in_place(f, t_n, &mut out, k, sign, &mut ws)?;
    Ok(StateVector::from_finite(out))
}

/// The same macro step written as a single update
///
/// ```text
/// Y^{n+1} = Y^n + s (k/6) [ F(t_n, Y^n) + F(t_n + k/3, Y^n + (k/3) F(t_n, Y^n))
///                          + F(t_{n+1/3}, Y^{n+1/3}) + F(t_{n+1/3} + k/3, ...)
///                          + F(t_{n+2/3}, Y^{n+2/3}) + F(t_{n+2/3} + k/3, ...) ]
/// ```
///
/// The six stage values are gathered first; the increment is then
/// accumulated pairwise in stage order so the result agrees bit-for-bit
/// with [`advance_one_step`].
pub fn composed_step<F: RhsField + ?Sized>(
    f: &F,
    t_n: f64,
    y: &StateVector,
    k: f64,
    sign: SignConvention,
) -> Result<StateVector> {
    check_dims(f, y)?;
    check_step(k)?;
    let dim = y.dim();
    let h = k / 3.0;
    let weight = sign.factor() * (k / 6.0);
    let mut ws = Workspace::new(dim);

    // stage_pairs[j] = (F(t_{n+j/3}, Y^{n+j/3}), F(t_{n+j/3} + k/3, predictor))
    let mut stage_pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(3);
    let mut intermediate = y.to_vec();
    for t in substep_times(t_n, h) {
        ws.stages(f, t, &intermediate, h)?;
        for ((yi, &a), &b) in intermediate.iter_mut().zip(&ws.f0).zip(&ws.f1) {
            *yi += weight * (a + b);
        }
        ensure_finite(&intermediate, t + h)?;
        stage_pairs.push((ws.f0.clone(), ws.f1.clone()));
    }

    let mut out = y.to_vec();
    for (a, b) in &stage_pairs {
        for i in 0..dim {
            out[i] += weight * (a[i] + b[i]);
        }
    }
    ensure_finite(&out, t_n + k)?;
    Ok(StateVector::from_finite(out))
}

/// Integrates `dy/dt = f(t, y)` over `grid` from `y0`.
///
/// On a non-finite value the run stops and returns [`Error::Blowup`] with
/// the failing step and every state computed before it.
pub fn integrate<F: RhsField + ?Sized>(
    f: &F,
    y0: &StateVector,
    grid: &TimeGrid,
    sign: SignConvention,
) -> Result<Trajectory> {
    check_dims(f, y0)?;
    let k = grid.k();
    let mut ws = Workspace::new(y0.dim());
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(y0.clone());
    let mut current = y0.to_vec();
    for n in 0..grid.steps() {
        let t_n = grid.time(n);
        if let Err(err) = advance_in_place(f, t_n, &mut current, k, sign, &mut ws) {
            let t = match err {
                Error::NonFinite { t } => t,
                _ => t_n,
            };
            return Err(Error::Blowup(Box::new(Blowup {
                step: n,
                t,
                partial: states,
            })));
        }
        states.push(StateVector::from_finite(current.clone()));
    }
    Trajectory::new(*grid, states)
}

/// Roots of the first characteristic polynomial `z^3 - 1`, `z = lambda^{1/3}`.
pub fn zero_stability_roots() -> [Complex64; 3] {
    let half_sqrt3 = 3.0_f64.sqrt() / 2.0;
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(-0.5, -half_sqrt3),
        Complex64::new(-0.5, half_sqrt3),
    ]
}

/// Moduli of [`zero_stability_roots`].
pub fn zero_stability_root_moduli() -> (f64, f64, f64) {
    let [a, b, c] = zero_stability_roots();
    (a.norm(), b.norm(), c.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    struct Zero(usize);

    impl RhsField for Zero {
        fn dim(&self) -> usize {
            self.0
        }
        fn eval(&self, _t: f64, _y: &[f64], dydt: &mut [f64]) {
            dydt.fill(0.0);
        }
    }

    struct Constant(Vec<f64>);

    impl RhsField for Constant {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn eval(&self, _t: f64, _y: &[f64], dydt: &mut [f64]) {
            dydt.copy_from_slice(&self.0);
        }
    }

    /// Scalar `y' = y`, counting evaluations.
    struct Growth {
        calls: Cell<usize>,
    }

    impl RhsField for Growth {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            self.calls.set(self.calls.get() + 1);
            dydt[0] = y[0];
        }
    }

    struct Explode;

    impl RhsField for Explode {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, t: f64, _y: &[f64], dydt: &mut [f64]) {
            dydt[0] = if t > 0.5 { f64::INFINITY } else { 1.0 };
        }
    }

    fn sv(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn stage_constants_satisfy_order_conditions() {
        for r in StageConstants::CHOSEN.order_condition_residuals() {
            assert!(r.abs() < 1e-15);
        }
    }

    #[test]
    fn substep_on_trivial_fields() {
        let y = sv(&[1.0, -2.0, 3.5]);
        let out = heun_substep(&Zero(3), 0.4, &y, 0.1, SignConvention::ConsistentPlus).unwrap();
        assert_eq!(out, y);

        let c = Constant(vec![2.0, -1.0, 0.5]);
        let out = heun_substep(&c, 0.0, &y, 0.25, SignConvention::ConsistentPlus).unwrap();
        assert_eq!(out.as_slice(), &[1.5, -2.25, 3.625]);
    }

    #[test]
    fn substep_on_linear_growth() {
        let f = Growth {
            calls: Cell::new(0),
        };
        let out = heun_substep(&f, 0.0, &sv(&[1.0]), 0.3, SignConvention::ConsistentPlus).unwrap();
        assert!((out[0] - 1.345).abs() < 1e-15, "{}", out[0]);
        assert_eq!(f.calls.get(), 2);

        // minus mode flips the increment only
        let out = heun_substep(&f, 0.0, &sv(&[1.0]), 0.3, SignConvention::PaperMinus).unwrap();
        assert!((out[0] - 0.655).abs() < 1e-15);
    }

    #[test]
    fn macro_step_on_linear_growth() {
        let f = Growth {
            calls: Cell::new(0),
        };
        let out =
            advance_one_step(&f, 0.0, &sv(&[1.0]), 0.3, SignConvention::ConsistentPlus).unwrap();
        // (1 + z + z^2/2)^3 with z = 0.1
        assert!((out[0] - 1.349232625).abs() < 1e-14, "{}", out[0]);
        assert_eq!(f.calls.get(), 6);
    }

    #[test]
    fn macro_step_on_trivial_fields() {
        let y = sv(&[0.5, 7.0]);
        assert_eq!(
            advance_one_step(&Zero(2), 3.0, &y, 0.2, SignConvention::ConsistentPlus).unwrap(),
            y
        );
        let c = Constant(vec![1.5, -3.0]);
        let out = advance_one_step(&c, 0.0, &y, 0.75, SignConvention::ConsistentPlus).unwrap();
        assert!((out[0] - (0.5 + 0.75 * 1.5)).abs() < 1e-15);
        assert!((out[1] - (7.0 - 0.75 * 3.0)).abs() < 1e-15);
        let out = composed_step(&c, 0.0, &y, 0.75, SignConvention::ConsistentPlus).unwrap();
        assert!((out[0] - (0.5 + 0.75 * 1.5)).abs() < 1e-15);
        assert_eq!(
            composed_step(&Zero(2), 0.0, &y, 0.1, SignConvention::ConsistentPlus).unwrap(),
            y
        );
    }

    #[test]
    fn composed_matches_chained_on_growth() {
        let f = Growth {
            calls: Cell::new(0),
        };
        for sign in [SignConvention::ConsistentPlus, SignConvention::PaperMinus] {
            let y = sv(&[0.7310585786300049]);
            let a = advance_one_step(&f, 0.1, &y, 0.3, sign).unwrap();
            let b = composed_step(&f, 0.1, &y, 0.3, sign).unwrap();
            assert_eq!(a[0].to_bits(), b[0].to_bits());
        }
    }

    #[test]
    fn dimension_and_step_errors() {
        let y = sv(&[1.0, 2.0]);
        assert!(matches!(
            advance_one_step(&Zero(3), 0.0, &y, 0.1, SignConvention::ConsistentPlus),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            heun_substep(&Zero(2), 0.0, &y, -0.1, SignConvention::ConsistentPlus),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let err = heun_substep(
            &Explode,
            0.9,
            &sv(&[0.0]),
            0.1,
            SignConvention::ConsistentPlus,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { t } if t == 0.9));

        let grid = TimeGrid::with_steps(0.0, 1.0, 4).unwrap();
        match integrate(&Explode, &sv(&[0.0]), &grid, SignConvention::ConsistentPlus) {
            Err(Error::Blowup(b)) => {
                // steps 0 and 1 cover [0, 0.5]; the predictor of step 1 reaches t = 0.5 + ...
                assert!(b.step >= 1 && b.step <= 2, "step {}", b.step);
                assert_eq!(b.partial.len(), b.step + 1);
                assert_eq!(b.partial[0][0], 0.0);
                assert!(b.last_state()[0].is_finite());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn integrate_zero_field_is_constant() {
        let y0 = sv(&[1.0, -4.0, 2.5]);
        let grid = TimeGrid::with_steps(0.0, 1.0, 10).unwrap();
        let traj = integrate(&Zero(3), &y0, &grid, SignConvention::ConsistentPlus).unwrap();
        assert_eq!(traj.states.len(), 11);
        assert!(traj.states.iter().all(|s| *s == y0));
        assert!(traj.negativity_flag);
    }

    #[test]
    fn root_moduli_are_one() {
        let (a, b, c) = zero_stability_root_moduli();
        for m in [a, b, c] {
            assert!((m - 1.0).abs() <= 1e-15);
        }
        let roots = zero_stability_roots();
        let sum: Complex64 = roots.iter().sum();
        assert!(sum.norm() <= 1e-15);
        let prod: Complex64 = roots.iter().product();
        assert!((prod.norm() - 1.0).abs() <= 1e-15);
        for z in roots {
            assert!((z * z * z - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn sign_parses() {
        assert_eq!(
            "plus".parse::<SignConvention>().unwrap(),
            SignConvention::ConsistentPlus
        );
        assert_eq!(
            " MINUS ".parse::<SignConvention>().unwrap(),
            SignConvention::PaperMinus
        );
        assert!("both".parse::<SignConvention>().is_err());
        assert_eq!(SignConvention::default(), SignConvention::ConsistentPlus);
    }
}
