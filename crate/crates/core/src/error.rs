use thiserror::Error;

use crate::numerics::StateVector;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied arguments outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// The right-hand side produced a non-finite value during a substep.
    #[error("non-finite value produced by the right-hand side near t = {t}")]
    NonFinite { t: f64 },

    /// An integration diverged; carries everything computed before the failure.
    #[error("numerical blow-up at step {} (t = {})", .0.step, .0.t)]
    Blowup(Box<Blowup>),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

/// Diagnostics for a diverged integration.
#[derive(Debug, Clone)]
pub struct Blowup {
    /// Index `n` of the step `t_n -> t_{n+1}` that failed.
    pub step: usize,
    /// Time at which the non-finite value appeared.
    pub t: f64,
    /// States `Y^0 ..= Y^step`, all finite.
    pub partial: Vec<StateVector>,
}

impl Blowup {
    pub fn last_state(&self) -> &StateVector {
        self.partial
            .last()
            .expect("partial trajectory always holds y0")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
