use thiserror::Error;

use crate::ergodicity::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation requires the {expected} regime, parameters are {actual}")]
    Regime { expected: &'static str, actual: Regime },

    #[error("no convergence certificate exists in the critical regime (mu*mu0 == lambda*(lambda+mu0))")]
    NoCertificate,

    #[error("truncation too small: {mass:.3e} of probability mass at the boundary (limit {limit:.1e}); try M = {suggested}")]
    TruncationTooSmall {
        mass: f64,
        limit: f64,
        suggested: usize,
    },

    #[error("stationary solve did not converge: tail mass {tail:.3e} at cap M = {cap}")]
    NoConvergence { tail: f64, cap: usize },

    #[error("stationary residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    Residual { residual: f64, tol: f64 },

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("unreliable bound: weighted deviation at truncation edge is {edge:.3e} (limit {limit:.1e})")]
    UnreliableBound { edge: f64, limit: f64 },

    #[error("orbit size overflow on path {path}")]
    OrbitOverflow { path: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
