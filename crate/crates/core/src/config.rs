//! Line-oriented `key = value` run configuration.
//!
//! `#` starts a comment, blank lines are ignored, keys are
//! case-insensitive, lists are comma-separated, and a key may appear only
//! once.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::integrator::SignConvention;
use crate::model::{CpParams, EraPreset};
use crate::numerics::StateVector;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?} (first set on line {first})")]
    DuplicateKey {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: malformed number {text:?} for key {key:?}")]
    MalformedNumber {
        line: usize,
        key: String,
        text: String,
    },
    #[error("line {line}: {message}")]
    InvalidValue { line: usize, message: String },
    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl ConfigError {
    /// Line the error was found on, when it is tied to one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Syntax { line }
            | ConfigError::UnknownKey { line, .. }
            | ConfigError::DuplicateKey { line, .. }
            | ConfigError::MalformedNumber { line, .. }
            | ConfigError::InvalidValue { line, .. } => Some(*line),
            ConfigError::MissingKeys(_) | ConfigError::InvalidParams(_) => None,
        }
    }
}

/// Everything needed to run the model outside the built-in presets.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t0: f64,
    pub t_end: f64,
    pub k: f64,
    /// `None` when the file does not pin a sign.
    pub sign: Option<SignConvention>,
    pub params: CpParams,
    pub y0: StateVector,
    pub eras: Vec<f64>,
}

const PARAM_KEYS: [&str; 17] = [
    "theta", "gamma", "rho", "mu", "p1", "p2", "beta1", "beta2", "alpha1", "alpha2", "r1", "r2",
    "tau", "b1", "b2", "sigma", "bign",
];

/// Keys that must be present, in canonical order.
const REQUIRED_KEYS: [&str; 22] = [
    "t0", "t", "k", "theta", "gamma", "rho", "mu", "p1", "p2", "beta1", "beta2", "alpha1",
    "alpha2", "r1", "r2", "tau", "b1", "b2", "sigma", "bign", "y0", "eras",
];

const OPTIONAL_KEYS: [&str; 1] = ["sign"];

struct Entry {
    line: usize,
    value: String,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::Syntax { line })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        if !REQUIRED_KEYS.contains(&key.as_str()) && !OPTIONAL_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        if let Some(prev) = entries.get(&key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key,
                first: prev.line,
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let missing: Vec<String> = REQUIRED_KEYS
        .iter()
        .filter(|k| !entries.contains_key(**k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::MissingKeys(missing));
    }

    let scalar = |key: &str| -> Result<f64, ConfigError> {
        let e = &entries[key];
        parse_number(key, e.line, &e.value)
    };
    let list = |key: &str| -> Result<Vec<f64>, ConfigError> {
        let e = &entries[key];
        e.value
            .split(',')
            .map(|item| parse_number(key, e.line, item.trim()))
            .collect()
    };

    let mut p = [0.0; 17];
    for (slot, key) in p.iter_mut().zip(PARAM_KEYS) {
        *slot = scalar(key)?;
    }
    let params = CpParams {
        theta: p[0],
        gamma: p[1],
        rho: p[2],
        mu: p[3],
        p1: p[4],
        p2: p[5],
        beta1: p[6],
        beta2: p[7],
        alpha1: p[8],
        alpha2: p[9],
        r1: p[10],
        r2: p[11],
        tau: p[12],
        b1: p[13],
        b2: p[14],
        sigma: p[15],
        n: p[16],
    };
    params
        .validate()
        .map_err(|e| ConfigError::InvalidParams(e.to_string()))?;

    let y0_line = entries["y0"].line;
    let y0 = list("y0")?;
    if y0.len() != 5 {
        return Err(ConfigError::InvalidValue {
            line: y0_line,
            message: format!("y0 needs 5 values, got {}", y0.len()),
        });
    }
    let y0 = StateVector::new(y0).map_err(|e| ConfigError::InvalidValue {
        line: y0_line,
        message: e.to_string(),
    })?;

    let (t0, t_end, k) = (scalar("t0")?, scalar("t")?, scalar("k")?);
    if t_end <= t0 {
        return Err(ConfigError::InvalidValue {
            line: entries["t"].line,
            message: format!("T = {t_end} must exceed t0 = {t0}"),
        });
    }
    if !(k > 0.0) {
        return Err(ConfigError::InvalidValue {
            line: entries["k"].line,
            message: format!("k = {k} must be positive"),
        });
    }

    let eras_line = entries["eras"].line;
    let eras = list("eras")?;
    if eras.len() < 2 || eras.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ConfigError::InvalidValue {
            line: eras_line,
            message: "eras need at least two strictly increasing values".into(),
        });
    }

    let sign = match entries.get("sign") {
        Some(e) => Some(e.value.parse().map_err(|_| ConfigError::InvalidValue {
            line: e.line,
            message: format!("sign must be plus or minus, got {:?}", e.value),
        })?),
        None => None,
    };

    Ok(RunConfig {
        t0,
        t_end,
        k,
        sign,
        params,
        y0,
        eras,
    })
}

fn parse_number(key: &str, line: usize, text: &str) -> Result<f64, ConfigError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError::MalformedNumber {
            line,
            key: key.to_string(),
            text: text.to_string(),
        }),
    }
}

impl RunConfig {
    pub fn from_preset(preset: &EraPreset) -> Self {
        RunConfig {
            t0: preset.t0,
            t_end: preset.t_end,
            k: preset.k,
            sign: None,
            params: preset.params,
            y0: preset.y0.clone(),
            eras: preset.era_boundaries.clone(),
        }
    }

    /// Renders the config in the format read by [`parse_config`]. Numbers
    /// use the shortest representation that parses back to the same value.
    pub fn to_config_text(&self) -> String {
        let p = &self.params;
        let values = [
            p.theta, p.gamma, p.rho, p.mu, p.p1, p.p2, p.beta1, p.beta2, p.alpha1, p.alpha2, p.r1,
            p.r2, p.tau, p.b1, p.b2, p.sigma, p.n,
        ];
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };

        let mut out = String::new();
        let _ = writeln!(out, "t0 = {:?}", self.t0);
        let _ = writeln!(out, "T = {:?}", self.t_end);
        let _ = writeln!(out, "k = {:?}", self.k);
        if let Some(sign) = self.sign {
            let _ = writeln!(out, "sign = {}", sign.as_str());
        }
        for (key, v) in PARAM_KEYS.iter().zip(values) {
            let _ = writeln!(out, "{key} = {v:?}");
        }
        let _ = writeln!(out, "y0 = {}", join(&self.y0));
        let _ = writeln!(out, "eras = {}", join(&self.eras));
        out
    }

    /// Adapts the config to the preset shape consumed by the scenario runner.
    pub fn to_preset(&self, label: &'static str) -> EraPreset {
        EraPreset {
            label,
            params: self.params,
            y0: self.y0.clone(),
            t0: self.t0,
            t_end: self.t_end,
            k: self.k,
            era_boundaries: self.eras.clone(),
            alpha_warning: self.params.alpha_mismatch().is_some(),
            published: None,
        }
    }
}
