//! Certified bounds against the truncated ODE solution.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ergodicity::{erg_bound, null_bound, RateCertificate, Regime};
use crate::error::{Error, Result};
use crate::kolmogorov::{l1_distance, stationary, transient, DistributionSnapshot, TransientOptions};
use crate::model::SystemParams;

/// Largest tolerated excess of an observed quantity over its bound.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub t: f64,
    /// Cutoff `N` for the null-regime rows; absent for the ergodic ones.
    pub cutoff: Option<u64>,
    /// `Σ_{i≤N} p_i(t)` or `‖p(t) - π‖_1`.
    pub observed: f64,
    pub bound: f64,
}

impl VerifyRow {
    pub fn slack(&self) -> f64 {
        self.bound - self.observed
    }

    pub fn holds(&self) -> bool {
        self.slack() >= -VIOLATION_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub regime: Regime,
    pub rows: Vec<VerifyRow>,
    /// Truncation actually used (the stationary solve may enlarge it).
    pub truncation: usize,
}

impl Verification {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(VerifyRow::holds)
    }

    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(VerifyRow::slack).fold(f64::INFINITY, f64::min)
    }

    /// CSV `t,N,observed,bound,slack`; `N` is empty in the ergodic regime.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,N,observed,bound,slack\n");
        for r in &self.rows {
            let n = r.cutoff.map(|n| n.to_string()).unwrap_or_default();
            writeln!(out, "{:.14e},{n},{:.14e},{:.14e},{:.14e}", r.t, r.observed, r.bound, r.slack()).unwrap();
        }
        out
    }
}

/// Null-regime check: `Σ_{i≤N} p_i(t) ≤ (δ_k/δ_N) e^{-ζ t}` from a point
/// mass at state `k`, for every cutoff and time.
pub fn verify_null(
    params: &SystemParams,
    cert: &RateCertificate,
    k: usize,
    cutoffs: &[u64],
    times: &[f64],
    opts: &TransientOptions,
) -> Result<Verification> {
    if cert.regime != Regime::NullErgodic {
        return Err(Error::Regime { expected: "NullErgodic", actual: cert.regime });
    }
    let p0 = DistributionSnapshot::point_mass(opts.truncation, k)?;
    let snaps = transient(params, &p0, times, opts)?;
    let mut rows = Vec::with_capacity(snaps.len() * cutoffs.len());
    for snap in &snaps {
        for &n in cutoffs {
            let take = usize::try_from(n).unwrap_or(usize::MAX).min(snap.probs.len());
            rows.push(VerifyRow {
                t: snap.t,
                cutoff: Some(n),
                observed: snap.probs[..take].iter().sum(),
                bound: null_bound(params, cert, k as u64, n, snap.t)?,
            });
        }
    }
    Ok(Verification { regime: Regime::NullErgodic, rows, truncation: opts.truncation })
}

/// Result of [`verify_erg`], with the solved distributions for callers that
/// want to inspect the decay.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgVerification {
    pub verification: Verification,
    pub stationary: DistributionSnapshot,
    pub snapshots: Vec<DistributionSnapshot>,
}

/// Exponential-regime check: `‖p(t) - π‖_1 ≤ 4 e^{-α t} Σ_{i≥2} g_i |p_i(0) - π_i|`
/// from a point mass at state `k`.
pub fn verify_erg(
    params: &SystemParams,
    cert: &RateCertificate,
    k: usize,
    times: &[f64],
    opts: &TransientOptions,
) -> Result<ErgVerification> {
    if cert.regime != Regime::ExponentiallyErgodic {
        return Err(Error::Regime { expected: "ExponentiallyErgodic", actual: cert.regime });
    }
    let pi = stationary(params, opts.truncation, 1e-12)?;
    let m = pi.probs.len();
    let opts = TransientOptions { truncation: m, ..*opts };
    let p0 = DistributionSnapshot::point_mass(m, k)?;
    let snaps = transient(params, &p0, times, &opts)?;
    let mut rows = Vec::with_capacity(snaps.len());
    for snap in &snaps {
        rows.push(VerifyRow {
            t: snap.t,
            cutoff: None,
            observed: l1_distance(&snap.probs, &pi.probs)?,
            bound: erg_bound(params, cert, &p0.probs, &pi.probs, snap.t)?.value,
        });
    }
    Ok(ErgVerification {
        verification: Verification { regime: Regime::ExponentiallyErgodic, rows, truncation: m },
        stationary: pi,
        snapshots: snaps,
    })
}
