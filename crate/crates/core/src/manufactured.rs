//! Verification problems with closed-form solutions.
//!
//! Both problems share the exact solution
//! `y1 = t^2 - t`, `y2 = (t^2 - t) e^{-t}`, `y3 = (t - 1) sin t` on `[0, 1]`
//! with `y(0) = 0`; the forcing terms `g_i` are chosen so that it solves
//! each system exactly.

use crate::integrator::RhsField;
use crate::numerics::StateVector;

/// A field paired with its exact solution on `[t0, T]`.
pub trait ReferenceSolution: RhsField {
    fn exact(&self, t: f64) -> Vec<f64>;

    fn span(&self) -> (f64, f64);

    fn initial_state(&self) -> StateVector {
        StateVector::new(self.exact(self.span().0)).expect("exact solution is finite at t0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManufacturedKind {
    /// `y1' = -y1 + g1`, `y2' = y1 - y2^2 + g2`, `y3' = y2^2 + g3`.
    Example1,
    /// `y1' = -y1 + y2 y3 + g1`, `y2' = y1 - y2 y3 + g2`, `y3' = y2^2 + g3`.
    Example2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManufacturedProblem {
    pub kind: ManufacturedKind,
}

pub fn example1() -> ManufacturedProblem {
    ManufacturedProblem {
        kind: ManufacturedKind::Example1,
    }
}

pub fn example2() -> ManufacturedProblem {
    ManufacturedProblem {
        kind: ManufacturedKind::Example2,
    }
}

impl ManufacturedProblem {
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "example1" => Some(example1()),
            "example2" => Some(example2()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ManufacturedKind::Example1 => "example1",
            ManufacturedKind::Example2 => "example2",
        }
    }

    /// Forcing terms `(g1, g2, g3)` at time `t`.
    pub fn forcing(&self, t: f64) -> [f64; 3] {
        let em = (-t).exp();
        let em2 = (-2.0 * t).exp();
        let (s, c) = t.sin_cos();
        let q = t * t - t;
        let g3 = -q * q * em2 + (t - 1.0) * c + s;
        match self.kind {
            ManufacturedKind::Example1 => [
                t * t + t - 1.0,
                q * q * em2 - (t * t - 3.0 * t + 1.0) * em - t * t + t,
                g3,
            ],
            ManufacturedKind::Example2 => {
                // y2 y3 = t (t - 1)^2 e^{-t} sin t
                let coupling = t * (t - 1.0) * (t - 1.0) * em * s;
                [
                    t * t + t - 1.0 - coupling,
                    t - t * t - (t * t - 3.0 * t + 1.0) * em + coupling,
                    g3,
                ]
            }
        }
    }

    /// Closed-form time derivative of the exact solution.
    pub fn exact_derivative(&self, t: f64) -> [f64; 3] {
        let em = (-t).exp();
        let (s, c) = t.sin_cos();
        [
            2.0 * t - 1.0,
            -(t * t - 3.0 * t + 1.0) * em,
            s + (t - 1.0) * c,
        ]
    }
}

pub(crate) fn exact_solution(t: f64) -> [f64; 3] {
    let q = t * t - t;
    [q, q * (-t).exp(), (t - 1.0) * t.sin()]
}

impl RhsField for ManufacturedProblem {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let g = self.forcing(t);
        let (y1, y2, y3) = (y[0], y[1], y[2]);
        match self.kind {
            ManufacturedKind::Example1 => {
                dydt[0] = -y1 + g[0];
                dydt[1] = y1 - y2 * y2 + g[1];
                dydt[2] = y2 * y2 + g[2];
            }
            ManufacturedKind::Example2 => {
                dydt[0] = -y1 + y2 * y3 + g[0];
                dydt[1] = y1 - y2 * y3 + g[1];
                dydt[2] = y2 * y2 + g[2];
            }
        }
    }
}

impl ReferenceSolution for ManufacturedProblem {
    fn exact(&self, t: f64) -> Vec<f64> {
        exact_solution(t).to_vec()
    }

    fn span(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_fd(p: &ManufacturedProblem, t: f64) -> f64 {
        let h = 1e-6;
        let plus = exact_solution(t + h);
        let minus = exact_solution(t - h);
        let y = exact_solution(t);
        let mut f = [0.0; 3];
        p.eval(t, &y, &mut f);
        (0..3)
            .map(|i| ((plus[i] - minus[i]) / (2.0 * h) - f[i]).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn exact_values() {
        for p in [example1(), example2()] {
            assert_eq!(p.exact(0.0), vec![0.0, 0.0, 0.0]);
            assert_eq!(p.initial_state().as_slice(), &[0.0, 0.0, 0.0]);
            assert!(p.exact(1.0).iter().all(|v| *v == 0.0));
        }
        let y = example1().exact(0.5);
        assert_eq!(y[0], -0.25);
        assert!((y[1] - (-0.25 * (-0.5_f64).exp())).abs() < 1e-16);
        assert!((y[2] - (-0.5 * 0.5_f64.sin())).abs() < 1e-16);
    }

    #[test]
    fn residual_vanishes_at_interior_points() {
        for p in [example1(), example2()] {
            for i in 1..10 {
                let t = i as f64 / 10.0;
                let r = residual_fd(&p, t);
                assert!(r < 1e-9, "{} t={t} residual {r}", p.name());

                let y = exact_solution(t);
                let mut f = [0.0; 3];
                p.eval(t, &y, &mut f);
                let d = p.exact_derivative(t);
                for j in 0..3 {
                    assert!(
                        (d[j] - f[j]).abs() < 1e-14,
                        "{} t={t} component {j}",
                        p.name()
                    );
                }
            }
        }
    }

    #[test]
    fn exact_is_finite_on_span() {
        for n in 0..=100 {
            let t = n as f64 / 100.0;
            assert!(exact_solution(t).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn fields_differ_at_generic_point() {
        let y = [0.3, -0.2, 0.7];
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        example1().eval(0.4, &y, &mut a);
        example2().eval(0.4, &y, &mut b);
        assert_ne!(a, b);
    }

    /// The second problem's g1 and g2 as typeset in the source material
    /// (missing the e^{-t} factor on the coupling in g1 and carrying an
    /// extra (t^2 - t)^2 e^{-2t} term in g2) leave a nonzero residual.
    #[test]
    fn typeset_forcing_for_second_problem_is_inconsistent() {
        let t: f64 = 0.5;
        let q = t * t - t;
        let g1 = t * t + t - 1.0 - t * (t - 1.0).powi(2) * t.sin();
        let g2 = t - t * t + q * q * (-2.0 * t).exp() - (t * t - 3.0 * t + 1.0) * (-t).exp()
            + t * (t - 1.0).powi(2) * (-t).exp() * t.sin();
        let y = exact_solution(t);
        let d = example2().exact_derivative(t);
        let r1 = d[0] - (-y[0] + y[1] * y[2] + g1);
        let r2 = d[1] - (y[0] - y[1] * y[2] + g2);
        assert!(r1.abs() > 1e-3, "{r1}");
        assert!(r2.abs() > 1e-3, "{r2}");
    }
}
