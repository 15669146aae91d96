//! Five-compartment corruption-poverty model.
//!
//! Compartments: `y1` susceptible, `y2` corrupt, `y3` poor, `y4`
//! prosecuted/jailed, `y5` honest. Bilinear contact terms are scaled by
//! `1/N`; recruitment `theta` is an absolute inflow into `y1`.

use crate::error::{Error, Result};
use crate::integrator::RhsField;
use crate::numerics::StateVector;

pub const COMPARTMENTS: usize = 5;

/// Display names of the compartments, in state order.
pub const COMPARTMENT_LABELS: [&str; COMPARTMENTS] = ["y1", "y2", "y3", "y4", "y5"];

/// Absolute difference between stored and derived contact rates above which
/// a preset or config is flagged.
pub const ALPHA_MISMATCH_TOLERANCE: f64 = 1e-6;

/// Model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpParams {
    /// Recruitment inflow (persons per unit time).
    pub theta: f64,
    /// Death/removal rate.
    pub gamma: f64,
    /// Inverse mean prison stay.
    pub rho: f64,
    /// Fraction of released prisoners who become honest.
    pub mu: f64,
    pub p1: f64,
    pub p2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Effective corruption contact rate.
    pub alpha1: f64,
    /// Effective poverty contact rate.
    pub alpha2: f64,
    pub r1: f64,
    pub r2: f64,
    pub tau: f64,
    pub b1: f64,
    pub b2: f64,
    pub sigma: f64,
    /// Population size.
    pub n: f64,
}

impl CpParams {
    /// Checks every parameter against its admissible range.
    pub fn validate(&self) -> Result<()> {
        let unit = [
            ("mu", self.mu),
            ("p1", self.p1),
            ("p2", self.p2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
        ];
        let nonneg = [
            ("theta", self.theta),
            ("gamma", self.gamma),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("r1", self.r1),
            ("r2", self.r2),
            ("tau", self.tau),
            ("b1", self.b1),
            ("b2", self.b2),
            ("sigma", self.sigma),
        ];
        let positive = [("rho", self.rho), ("N", self.n)];

        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::usage(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::usage(format!(
                    "{name} = {v} must be finite and >= 0"
                )));
            }
        }
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::usage(format!("{name} = {v} must be finite and > 0")));
            }
        }
        Ok(())
    }

    /// Release flow into corruption, `rho (1 - mu)`.
    pub fn rho_one_minus_mu(&self) -> f64 {
        self.rho * (1.0 - self.mu)
    }

    /// Release flow into honesty, `rho mu`.
    pub fn rho_mu(&self) -> f64 {
        self.rho * self.mu
    }

    /// Contact rates implied by `p (1 - beta)`.
    pub fn derived_contact_rates(&self) -> Result<(f64, f64)> {
        effective_contact_rates(self.p1, self.beta1, self.p2, self.beta2)
    }

    /// Largest absolute gap between stored and derived contact rates, when
    /// it exceeds [`ALPHA_MISMATCH_TOLERANCE`].
    pub fn alpha_mismatch(&self) -> Option<AlphaMismatch> {
        let (d1, d2) = self.derived_contact_rates().ok()?;
        let gap = (self.alpha1 - d1).abs().max((self.alpha2 - d2).abs());
        (gap > ALPHA_MISMATCH_TOLERANCE).then_some(AlphaMismatch {
            stored: (self.alpha1, self.alpha2),
            derived: (d1, d2),
        })
    }
}

/// Stored contact rates that disagree with `p (1 - beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMismatch {
    pub stored: (f64, f64),
    pub derived: (f64, f64),
}

impl std::fmt::Display for AlphaMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "contact rates (alpha1, alpha2) = ({}, {}) differ from p(1-beta) = ({}, {})",
            self.stored.0, self.stored.1, self.derived.0, self.derived.1
        )
    }
}

/// `(p1 (1 - beta1), p2 (1 - beta2))`.
pub fn effective_contact_rates(p1: f64, beta1: f64, p2: f64, beta2: f64) -> Result<(f64, f64)> {
    for (name, v) in [("p1", p1), ("beta1", beta1), ("p2", p2), ("beta2", beta2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::usage(format!("{name} = {v} must lie in [0, 1]")));
        }
    }
    Ok((p1 * (1.0 - beta1), p2 * (1.0 - beta2)))
}

/// Autonomous right-hand side of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpRhs {
    params: CpParams,
}

/// Builds the model field after validating `params`.
pub fn cp_rhs(params: CpParams) -> Result<CpRhs> {
    params.validate()?;
    Ok(CpRhs { params })
}

impl CpRhs {
    pub fn params(&self) -> &CpParams {
        &self.params
    }

    /// Evaluates the field on a state vector of dimension 5.
    pub fn evaluate(&self, t: f64, y: &[f64]) -> Result<[f64; COMPARTMENTS]> {
        if y.len() != COMPARTMENTS {
            return Err(Error::usage(format!(
                "model state has dimension {COMPARTMENTS}, got {}",
                y.len()
            )));
        }
        let mut out = [0.0; COMPARTMENTS];
        self.eval(t, y, &mut out);
        Ok(out)
    }
}

impl RhsField for CpRhs {
    fn dim(&self) -> usize {
        COMPARTMENTS
    }

    fn eval(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        let p = &self.params;
        let inv_n = 1.0 / p.n;
        let (y1, y2, y3, y4, y5) = (y[0], y[1], y[2], y[3], y[4]);
        let rho_release = p.rho_one_minus_mu();
        let rho_honest = p.rho_mu();

        dydt[0] =
            p.theta - inv_n * (p.alpha1 * y1 * y2 + p.alpha2 * y1 * y3) - (p.gamma + p.sigma) * y1;
        dydt[1] = inv_n * (p.alpha1 * y1 * y2 + p.r2 * y2 * y3)
            - (p.gamma + p.b1 + p.tau + p.r1) * y2
            + rho_release * y4;
        dydt[2] = inv_n * (p.alpha2 * y1 * y3 - p.r2 * y2 * y3) + p.r1 * y2 - (p.gamma + p.b2) * y3;
        dydt[3] = p.tau * y2 - (rho_release + rho_honest + p.gamma) * y4;
        dydt[4] = p.sigma * y1 + p.b1 * y2 + p.b2 * y3 + rho_honest * y4 - p.gamma * y5;
    }
}

/// `sum_i F_i(y) - (theta - gamma sum_i y_i)`; zero up to rounding because
/// every transfer between compartments cancels in the total.
pub fn conservation_residual(params: &CpParams, y: &[f64]) -> Result<f64> {
    let field = cp_rhs(*params)?;
    let f = field.evaluate(0.0, y)?;
    let total_rate: f64 = f.iter().sum();
    let total: f64 = y.iter().sum();
    Ok(total_rate - (params.theta - params.gamma * total))
}

/// Named historical scenario: parameters, initial state, horizon, step,
/// and the boundaries of the eras it is summarised over.
#[derive(Debug, Clone, PartialEq)]
pub struct EraPreset {
    pub label: &'static str,
    pub params: CpParams,
    pub y0: StateVector,
    pub t0: f64,
    pub t_end: f64,
    pub k: f64,
    pub era_boundaries: Vec<f64>,
    /// Set when the stored contact rates disagree with `p (1 - beta)`.
    pub alpha_warning: bool,
    /// Published era averages and shares for side-by-side comparison.
    pub published: Option<PublishedSummary>,
}

/// Published per-era averages (persons), overall averages, and shares (%)
/// for each compartment.
#[derive(Debug, Clone, PartialEq)]
pub struct PublishedSummary {
    pub era_averages: [&'static [f64]; COMPARTMENTS],
    pub overall_average: [f64; COMPARTMENTS],
    pub share_percent: [f64; COMPARTMENTS],
}

pub const PRESET_LABELS: [&str; 3] = ["cameroon-1960", "cameroon-1986", "cameroon-2002"];

/// Looks up one of the three historical presets by label.
pub fn preset(label: &str) -> Result<EraPreset> {
    let (label, params, y0, t0, t_end, eras, published) = match label {
        "cameroon-1960" => (
            "cameroon-1960",
            CpParams {
                theta: 0.2,
                gamma: 0.2,
                rho: 1.0,
                mu: 0.55,
                p1: 0.3,
                p2: 0.1,
                beta1: 0.6,
                beta2: 0.7,
                alpha1: 0.018,
                alpha2: 0.03,
                r1: 0.45,
                r2: 0.5,
                tau: 0.6,
                b1: 0.3,
                b2: 0.3,
                sigma: 0.9,
                n: 1e7,
            },
            [3.5e6, 1.5e6, 1.5e6, 0.5e6, 3e6],
            1960.0,
            1986.0,
            vec![1960.0, 1965.0, 1970.0, 1975.0, 1980.0, 1986.0],
            PublishedSummary {
                era_averages: [
                    &[3.5077e6, 3.5233e6, 3.5428e6, 3.5664e6, 3.5862e6],
                    &[1.5040e6, 1.5119e6, 1.5219e6, 1.5340e6, 1.5442e6],
                    &[1.5003e6, 1.5010e6, 1.5019e6, 1.5028e6, 1.5036e6],
                    &[0.4994e6, 0.4982e6, 0.4966e6, 0.4947e6, 0.4930e6],
                    &[2.9938e6, 2.9813e6, 2.9656e6, 2.9467e6, 2.9308e6],
                ],
                overall_average: [3.5453e6, 1.5225e6, 1.5019e6, 0.4964e6, 2.9636e6],
                share_percent: [35.5, 15.0, 15.0, 5.0, 30.0],
            },
        ),
        "cameroon-1986" => (
            "cameroon-1986",
            CpParams {
                theta: 0.3,
                gamma: 0.3,
                rho: 1.0,
                mu: 0.3,
                p1: 0.8,
                p2: 0.4,
                beta1: 0.1,
                beta2: 0.15,
                alpha1: 0.72,
                alpha2: 0.34,
                r1: 0.8,
                r2: 0.9,
                tau: 0.15,
                b1: 0.1,
                b2: 0.12,
                sigma: 0.6,
                n: 1.6e7,
            },
            [2.4e6, 3.2e6, 6.4e6, 2.4e6, 1.6e6],
            1986.0,
            2002.0,
            vec![1986.0, 1990.0, 1994.0, 1998.0, 2002.0],
            PublishedSummary {
                era_averages: [
                    &[2.4191e6, 2.4411e6, 2.4634e6, 2.4859e6],
                    &[3.2080e6, 3.2170e6, 3.2259e6, 3.2347e6],
                    &[6.4067e6, 6.4143e6, 6.4218e6, 6.4294e6],
                    &[2.4186e6, 2.4400e6, 2.4616e6, 2.4834e6],
                    &[1.5838e6, 1.5651e6, 1.5462e6, 1.5272e6],
                ],
                overall_average: [2.4524e6, 3.2214e6, 6.4181e6, 2.4509e6, 1.5556e6],
                share_percent: [15.3, 20.1, 40.1, 15.3, 9.7],
            },
        ),
        "cameroon-2002" => (
            "cameroon-2002",
            CpParams {
                theta: 0.25,
                gamma: 0.25,
                rho: 1.0,
                mu: 0.35,
                p1: 0.75,
                p2: 0.38,
                beta1: 0.25,
                beta2: 0.4,
                alpha1: 0.5625,
                alpha2: 0.228,
                r1: 0.75,
                r2: 0.8,
                tau: 0.3,
                b1: 0.15,
                b2: 0.15,
                sigma: 0.8,
                n: 2.5e7,
            },
            [5e6, 4.25e6, 9.5e6, 3e6, 3.25e6],
            2002.0,
            2022.0,
            vec![2002.0, 2006.0, 2010.0, 2014.0, 2018.0, 2022.0],
            PublishedSummary {
                era_averages: [
                    &[5.0301e6, 5.0726e6, 5.1094e6, 5.1526e6, 5.1899e6],
                    &[4.2622e6, 4.2793e6, 4.2940e6, 4.3111e6, 4.3258e6],
                    &[9.5073e6, 9.5176e6, 9.5263e6, 9.5365e6, 9.5452e6],
                    &[3.0124e6, 3.0299e6, 3.0449e6, 3.0626e6, 3.0778e6],
                    &[3.2237e6, 3.1866e6, 3.1545e6, 3.1168e6, 3.0843e6],
                ],
                overall_average: [5.1109e6, 4.2945e6, 9.5266e6, 3.0455e6, 3.1532e6],
                share_percent: [20.4, 17.2, 38.1, 12.2, 12.6],
            },
        ),
        other => {
            return Err(Error::usage(format!(
                "unknown preset {other:?} (expected one of {})",
                PRESET_LABELS.join(", ")
            )))
        }
    };
    Ok(EraPreset {
        label,
        alpha_warning: params.alpha_mismatch().is_some(),
        params,
        y0: StateVector::from_finite(y0.to_vec()),
        t0,
        t_end,
        k: 1e-3,
        era_boundaries: eras,
        published: Some(published),
    })
}
