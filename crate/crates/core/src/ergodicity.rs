//! Regime classification, feasible weight parameters and certified rates.
//!
//! With `x* = μμ₀ / (λ(λ+μ₀))` the queue is null ergodic for `x* < 1`,
//! exponentially ergodic for `x* > 1` and critical at equality. In the
//! first two regimes a pair `(a, b)` of weight parameters makes the
//! corresponding weighted log norm negative; its negation is the certified
//! rate (`ζ` or `α`), and the bounds below follow.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::weights::{ErgComponents, ErgWeights, NullComponents, NullWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    NullErgodic,
    ExponentiallyErgodic,
    Critical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::NullErgodic => "NullErgodic",
            Regime::ExponentiallyErgodic => "ExponentiallyErgodic",
            Regime::Critical => "Critical",
        };
        f.write_str(s)
    }
}

/// The two sides of the stability inequality, `μμ₀` and `λ(λ+μ₀)`.
pub fn stability_sides(params: &SystemParams) -> (f64, f64) {
    (params.mu * params.mu0, params.lambda * (params.lambda + params.mu0))
}

pub fn classify(params: &SystemParams) -> Regime {
    let (service, load) = stability_sides(params);
    if service < load {
        Regime::NullErgodic
    } else if service > load {
        Regime::ExponentiallyErgodic
    } else {
        Regime::Critical
    }
}

fn require(params: &SystemParams, expected: Regime) -> Result<()> {
    match classify(params) {
        r if r == expected => Ok(()),
        Regime::Critical => Err(Error::NoCertificate),
        actual => Err(Error::Regime {
            expected: match expected {
                Regime::NullErgodic => "NullErgodic",
                Regime::ExponentiallyErgodic => "ExponentiallyErgodic",
                Regime::Critical => "Critical",
            },
            actual,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance from `v` to the nearer endpoint.
    pub fn margin(&self, v: f64) -> f64 {
        (v - self.lo).min(self.hi - v)
    }
}

/// `b* = μ(λ+μ₀) / (λ(λ+μ+μ₀))`.
pub fn null_b_star(params: &SystemParams) -> f64 {
    let SystemParams { lambda, mu, mu0 } = *params;
    mu * (lambda + mu0) / (lambda * (lambda + mu + mu0))
}

/// `x* = μμ₀ / (λ(λ+μ₀))`.
pub fn erg_x_star(params: &SystemParams) -> f64 {
    let SystemParams { lambda, mu, mu0 } = *params;
    mu * mu0 / (lambda * (lambda + mu0))
}

/// `(b*, 1)`.
pub fn null_b_interval(params: &SystemParams) -> Result<OpenInterval> {
    require(params, Regime::NullErgodic)?;
    Ok(OpenInterval { lo: null_b_star(params), hi: 1.0 })
}

/// `( μ₀/(λ(1-b)+μ₀), (λ - μ(b⁻¹-1))/(bλ) )`, the values of `a` making both
/// null-regime rate components positive for this `b`.
pub fn null_a_interval(params: &SystemParams, b: f64) -> Result<OpenInterval> {
    let bs = null_b_interval(params)?;
    if !bs.contains(b) {
        return Err(Error::domain(format!("b = {b} outside ({}, {})", bs.lo, bs.hi)));
    }
    Ok(raw_null_a_interval(params, b))
}

fn raw_null_a_interval(params: &SystemParams, b: f64) -> OpenInterval {
    let SystemParams { lambda, mu, mu0 } = *params;
    OpenInterval {
        lo: mu0 / (lambda * (1.0 - b) + mu0),
        hi: (lambda - mu * (1.0 / b - 1.0)) / (b * lambda),
    }
}

/// Feasible set of the exponentially ergodic regime in the coordinates
/// `x = ab` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgIntervals {
    params: SystemParams,
    /// `(1, x*)`.
    pub x: OpenInterval,
}

impl ErgIntervals {
    /// `( μ/(λ+μ₀), (λ+μ-xλ)/(λ+μ₀/x) )`; then `a = x/b`.
    pub fn b_given(&self, x: f64) -> Result<OpenInterval> {
        if !self.x.contains(x) {
            return Err(Error::domain(format!("x = {x} outside ({}, {})", self.x.lo, self.x.hi)));
        }
        Ok(raw_erg_b_interval(&self.params, x))
    }
}

fn raw_erg_b_interval(params: &SystemParams, x: f64) -> OpenInterval {
    let SystemParams { lambda, mu, mu0 } = *params;
    OpenInterval {
        lo: mu / (lambda + mu0),
        hi: (lambda + mu - x * lambda) / (lambda + mu0 / x),
    }
}

pub fn erg_intervals(params: &SystemParams) -> Result<ErgIntervals> {
    require(params, Regime::ExponentiallyErgodic)?;
    Ok(ErgIntervals {
        params: *params,
        x: OpenInterval { lo: 1.0, hi: erg_x_star(params) },
    })
}

/// Flat record of a certified rate.
///
/// `margin` is the smallest distance of the chosen parameters to an
/// endpoint of their feasibility intervals: `b` and `a` for the null
/// regime, `x = ab` and `b` for the ergodic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    pub regime: Regime,
    pub a: f64,
    pub b: f64,
    pub rate: f64,
    pub margin: f64,
}

impl RateCertificate {
    /// Certificate for hand-picked parameters, checked for feasibility.
    pub fn from_weights(params: &SystemParams, a: f64, b: f64) -> Result<Self> {
        match classify(params) {
            Regime::Critical => Err(Error::NoCertificate),
            Regime::NullErgodic => {
                let region = NullRegion::new(params);
                let (outer, inner) = (b, a);
                let margin = region.margin(outer, inner);
                if !(margin > 0.0) {
                    return Err(Error::domain(format!("(a, b) = ({a}, {b}) is not feasible")));
                }
                Ok(Self {
                    regime: Regime::NullErgodic,
                    a,
                    b,
                    rate: NullComponents::new(params, a, b)?.rate(),
                    margin,
                })
            }
            Regime::ExponentiallyErgodic => {
                let region = ErgRegion::new(params);
                let margin = region.margin(a * b, b);
                if !(margin > 0.0) {
                    return Err(Error::domain(format!("(a, b) = ({a}, {b}) is not feasible")));
                }
                Ok(Self {
                    regime: Regime::ExponentiallyErgodic,
                    a,
                    b,
                    rate: ErgComponents::new(params, a, b)?.rate(),
                    margin,
                })
            }
        }
    }

    pub fn null_weights(&self) -> Result<NullWeights> {
        if self.regime != Regime::NullErgodic {
            return Err(Error::Regime { expected: "NullErgodic", actual: self.regime });
        }
        NullWeights::new(self.a, self.b)
    }

    pub fn erg_weights(&self) -> Result<ErgWeights> {
        if self.regime != Regime::ExponentiallyErgodic {
            return Err(Error::Regime { expected: "ExponentiallyErgodic", actual: self.regime });
        }
        ErgWeights::new(self.a, self.b)
    }
}

/// Search resolution per coordinate.
pub const GRID_SIZE: usize = 200;
/// Distance kept from every feasibility boundary, in parameter units.
const BOUNDARY_BUFFER: f64 = 1e-7;
const GOLDEN_TOL: f64 = 1e-13;

/// A feasible region parameterized by an outer coordinate and, for each
/// outer value, an interval of the inner coordinate on which the rate is the
/// minimum of an increasing and a decreasing function.
trait Region {
    fn outer(&self) -> OpenInterval;
    fn inner(&self, outer: f64) -> OpenInterval;
    /// `(increasing, decreasing)` rate components in the inner coordinate.
    fn components(&self, outer: f64, inner: f64) -> (f64, f64);
    fn to_ab(&self, outer: f64, inner: f64) -> (f64, f64);

    fn rate(&self, outer: f64, inner: f64) -> f64 {
        let (up, down) = self.components(outer, inner);
        up.min(down)
    }

    fn margin(&self, outer: f64, inner: f64) -> f64 {
        let o = self.outer();
        if !o.contains(outer) {
            return -1.0;
        }
        o.margin(outer).min(self.inner(outer).margin(inner))
    }
}

fn shrink(iv: OpenInterval) -> OpenInterval {
    let buf = BOUNDARY_BUFFER.min(iv.width() / 4.0);
    OpenInterval { lo: iv.lo + buf, hi: iv.hi - buf }
}

struct NullRegion {
    params: SystemParams,
}

impl NullRegion {
    fn new(params: &SystemParams) -> Self {
        Self { params: *params }
    }
}

impl Region for NullRegion {
    fn outer(&self) -> OpenInterval {
        OpenInterval { lo: null_b_star(&self.params), hi: 1.0 }
    }

    fn inner(&self, b: f64) -> OpenInterval {
        // δ must decrease, so a < 1 as well.
        let raw = raw_null_a_interval(&self.params, b);
        OpenInterval { lo: raw.lo, hi: raw.hi.min(1.0) }
    }

    fn components(&self, b: f64, a: f64) -> (f64, f64) {
        let SystemParams { lambda, mu, mu0 } = self.params;
        let idle = lambda * (1.0 - b) - mu0 * (1.0 / a - 1.0);
        let busy = lambda * (1.0 - a * b) - mu * (1.0 / b - 1.0);
        (idle, busy)
    }

    fn to_ab(&self, b: f64, a: f64) -> (f64, f64) {
        (a, b)
    }
}

struct ErgRegion {
    params: SystemParams,
}

impl ErgRegion {
    fn new(params: &SystemParams) -> Self {
        Self { params: *params }
    }
}

impl Region for ErgRegion {
    fn outer(&self) -> OpenInterval {
        OpenInterval { lo: 1.0, hi: erg_x_star(&self.params) }
    }

    fn inner(&self, x: f64) -> OpenInterval {
        raw_erg_b_interval(&self.params, x)
    }

    fn components(&self, x: f64, b: f64) -> (f64, f64) {
        let SystemParams { lambda, mu, mu0 } = self.params;
        let odd = lambda + mu0 - mu / b;
        let even = lambda + mu - lambda * b - lambda * x - mu0 * b / x;
        (odd, even)
    }

    fn to_ab(&self, x: f64, b: f64) -> (f64, f64) {
        (x / b, b)
    }
}

/// Best inner coordinate for a fixed outer one: the crossing of the two
/// components if it lies inside the (shrunk) interval, else an endpoint.
fn best_inner<R: Region>(region: &R, outer: f64) -> Option<f64> {
    let iv = region.inner(outer);
    if iv.is_empty() {
        return None;
    }
    let iv = shrink(iv);
    let gap = |v: f64| {
        let (up, down) = region.components(outer, v);
        up - down
    };
    if gap(iv.lo) >= 0.0 {
        return Some(iv.lo);
    }
    if gap(iv.hi) <= 0.0 {
        return Some(iv.hi);
    }
    let (mut lo, mut hi) = (iv.lo, iv.hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // The rate is the smaller component; pick whichever side is larger.
    Some(if region.rate(outer, lo) >= region.rate(outer, hi) { lo } else { hi })
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    rate: f64,
    a: f64,
    b: f64,
    outer: f64,
    inner: f64,
}

impl Candidate {
    fn new<R: Region>(region: &R, outer: f64, inner: f64) -> Self {
        let (a, b) = region.to_ab(outer, inner);
        Self { rate: region.rate(outer, inner), a, b, outer, inner }
    }

    /// Lexicographic `(rate, a, b)`.
    fn beats(&self, other: &Candidate) -> bool {
        (self.rate, self.a, self.b)
            .partial_cmp(&(other.rate, other.a, other.b))
            .is_some_and(|o| o.is_gt())
    }
}

fn lerp(iv: OpenInterval, u: f64) -> f64 {
    iv.lo + (iv.hi - iv.lo) * u
}

fn optimize<R: Region>(region: &R) -> Candidate {
    let outer = shrink(region.outer());
    let cell = 1.0 / GRID_SIZE as f64;

    // Midpoint heuristic.
    let mid_outer = lerp(outer, 0.5);
    let mut best = Candidate::new(region, mid_outer, lerp(shrink(region.inner(mid_outer)), 0.5));
    let mut best_u = 0.5;

    for i in 0..GRID_SIZE {
        let u = (i as f64 + 0.5) * cell;
        let o = lerp(outer, u);
        let iv = region.inner(o);
        if iv.is_empty() {
            continue;
        }
        let iv = shrink(iv);
        for j in 0..GRID_SIZE {
            let c = Candidate::new(region, o, lerp(iv, (j as f64 + 0.5) * cell));
            if c.beats(&best) {
                best = c;
                best_u = u;
            }
        }
    }

    // Along the outer coordinate the inner optimum is solved exactly, so
    // only a one-dimensional golden-section search around the best cell
    // remains.
    let profile = |u: f64| -> Option<Candidate> {
        let o = lerp(outer, u);
        best_inner(region, o).map(|inner| Candidate::new(region, o, inner))
    };
    let score = |u: f64| profile(u).map_or(f64::NEG_INFINITY, |c| c.rate);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best_u - 2.0 * cell).max(0.0), (best_u + 2.0 * cell).min(1.0));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (score(x1), score(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = score(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = score(x1);
        }
    }
    for u in [lo, 0.5 * (lo + hi), hi, best_u] {
        if let Some(c) = profile(u) {
            if c.beats(&best) {
                best = c;
            }
        }
    }
    best
}

/// Maximizes the certified rate over the feasible `(a, b)` region.
///
/// A `200 × 200` grid over the feasible box (plus its midpoint) is followed
/// by a refinement that solves the inner coordinate at the crossing of the
/// two rate components and golden-section searches the outer one.
pub fn optimize_rate(params: &SystemParams) -> Result<RateCertificate> {
    match classify(params) {
        Regime::Critical => Err(Error::NoCertificate),
        Regime::NullErgodic => Ok(certificate(&NullRegion::new(params), Regime::NullErgodic)),
        Regime::ExponentiallyErgodic => Ok(certificate(&ErgRegion::new(params), Regime::ExponentiallyErgodic)),
    }
}

fn certificate<R: Region>(region: &R, regime: Regime) -> RateCertificate {
    let c = optimize(region);
    RateCertificate {
        regime,
        a: c.a,
        b: c.b,
        rate: c.rate,
        margin: region.margin(c.outer, c.inner),
    }
}

fn check_rate(cert: &RateCertificate, expected: f64) -> Result<()> {
    if (cert.rate - expected).abs() > 1e-12 * expected.abs().max(1.0) {
        return Err(Error::domain(format!(
            "certificate rate {} does not match the parameters (expected {expected})",
            cert.rate
        )));
    }
    Ok(())
}

/// `(δ_k / δ_N) · e^{-ζ t}`, bounding `Σ_{i≤N} p_i(t)` from `X(0) = k`.
pub fn null_bound(params: &SystemParams, cert: &RateCertificate, k: u64, n: u64, t: f64) -> Result<f64> {
    let w = cert.null_weights()?;
    check_rate(cert, NullComponents::new(params, cert.a, cert.b)?.rate())?;
    if k < 1 || n < 1 {
        return Err(Error::domain("state indices start at 1"));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    Ok((w.ln_delta(k) - w.ln_delta(n) - cert.rate * t).exp())
}

/// Summands of the weighted deviation are required to fall below this at
/// the truncation edge.
pub const TAIL_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgBound {
    /// `4 e^{-α t} Σ_{i≥2} g_i |p_i(0) - π_i|`.
    pub value: f64,
    /// `Σ_{i≥2} g_i |p_i(0) - π_i|` over the truncation.
    pub weighted_deviation: f64,
    /// Geometric extrapolation of the omitted tail of the weighted sum.
    pub tail_residual: f64,
}

/// Weighted initial deviation `Σ_{i≥2} g_i |p_i(0) - π_i|` and its tail
/// residual estimate. Index 0 of the slices is state 1.
pub fn weighted_deviation(w: &ErgWeights, p0: &[f64], pi: &[f64]) -> Result<(f64, f64)> {
    if p0.len() != pi.len() {
        return Err(Error::domain(format!("length mismatch: {} vs {}", p0.len(), pi.len())));
    }
    let n = p0.len();
    if n < 6 {
        return Err(Error::domain("need at least 6 states"));
    }
    let summand = |idx: usize| {
        let dev = (p0[idx] - pi[idx]).abs();
        if dev == 0.0 {
            0.0
        } else {
            (w.ln_g(idx as u64 + 1) + dev.ln()).exp()
        }
    };
    let terms: Vec<f64> = (1..n).map(summand).collect();
    let edge = terms[terms.len() - 1];
    if !(edge < TAIL_GUARD) {
        return Err(Error::UnreliableBound { edge, limit: TAIL_GUARD });
    }
    let sum: f64 = terms.iter().sum();
    // One orbit level is two states; extrapolate level to level.
    let m = terms.len();
    let last = terms[m - 1] + terms[m - 2];
    let prev = terms[m - 3] + terms[m - 4];
    let tail_residual = if last == 0.0 {
        0.0
    } else if prev > 0.0 && last < prev {
        let r = last / prev;
        last * r / (1.0 - r)
    } else {
        f64::INFINITY
    };
    Ok((sum, tail_residual))
}

/// `4 e^{-α t} Σ_{i≥2} g_i |p_i(0) - π_i|`, bounding `‖p(t) - π‖_1`.
pub fn erg_bound(params: &SystemParams, cert: &RateCertificate, p0: &[f64], pi: &[f64], t: f64) -> Result<ErgBound> {
    let w = cert.erg_weights()?;
    check_rate(cert, ErgComponents::new(params, cert.a, cert.b)?.rate())?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let (weighted, tail_residual) = weighted_deviation(&w, p0, pi)?;
    Ok(ErgBound {
        value: 4.0 * (-cert.rate * t).exp() * weighted,
        weighted_deviation: weighted,
        tail_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null_demo() -> SystemParams {
        SystemParams::new(2.0, 1.0, 1.0).unwrap()
    }

    fn erg_demo() -> SystemParams {
        SystemParams::new(1.0, 3.0, 2.0).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&null_demo()), Regime::NullErgodic);
        assert_eq!(classify(&erg_demo()), Regime::ExponentiallyErgodic);
        assert_eq!(classify(&SystemParams::new(1.0, 2.0, 1.0).unwrap()), Regime::Critical);
    }

    #[test]
    fn null_intervals() {
        let b = null_b_interval(&null_demo()).unwrap();
        assert_eq!((b.lo, b.hi), (0.375, 1.0));
        let b = null_b_interval(&SystemParams::new(1.0, 0.5, 1.0).unwrap()).unwrap();
        assert!((b.lo - 0.4).abs() < 1e-15);
        let a = null_a_interval(&null_demo(), 0.5).unwrap();
        assert_eq!((a.lo, a.hi), (0.5, 1.0));
        assert!(null_a_interval(&null_demo(), 0.3).is_err());
        assert!(null_b_interval(&erg_demo()).is_err());
        assert!(matches!(
            null_b_interval(&SystemParams::new(1.0, 2.0, 1.0).unwrap()),
            Err(Error::NoCertificate)
        ));
    }

    #[test]
    fn null_a_interval_nonempty_across_b() {
        for params in [null_demo(), SystemParams::new(1.0, 0.5, 1.0).unwrap(), SystemParams::new(3.0, 2.0, 0.7).unwrap()] {
            let bs = null_b_interval(&params).unwrap();
            for k in 1..1000 {
                let b = lerp(bs, k as f64 / 1000.0);
                let a = null_a_interval(&params, b).unwrap();
                assert!(a.lo < a.hi, "b = {b}: {a:?}");
            }
        }
    }

    #[test]
    fn erg_interval_examples() {
        let iv = erg_intervals(&erg_demo()).unwrap();
        assert_eq!((iv.x.lo, iv.x.hi), (1.0, 2.0));
        let b = iv.b_given(1.5).unwrap();
        assert_eq!(b.lo, 1.0);
        assert!((b.hi - 15.0 / 14.0).abs() < 1e-15);
        assert!(iv.b_given(2.5).is_err());
        assert!(erg_intervals(&null_demo()).is_err());
        for k in 1..1000 {
            let x = lerp(iv.x, k as f64 / 1000.0);
            assert!(!iv.b_given(x).unwrap().is_empty());
        }
    }

    #[test]
    fn hand_picked_certificates() {
        let c = RateCertificate::from_weights(&null_demo(), 0.75, 0.5).unwrap();
        assert!((c.rate - 0.25).abs() < 1e-15);
        let c = RateCertificate::from_weights(&erg_demo(), 10.0 / 7.0, 1.05).unwrap();
        assert!((c.rate - 0.05).abs() < 1e-14);
        assert!(RateCertificate::from_weights(&erg_demo(), 1.0, 1.0).is_err());
    }

    #[test]
    fn optimizer_beats_hand_picked() {
        let c = optimize_rate(&null_demo()).unwrap();
        assert_eq!(c.regime, Regime::NullErgodic);
        assert!(c.rate >= 0.25);
        let c = optimize_rate(&erg_demo()).unwrap();
        assert_eq!(c.regime, Regime::ExponentiallyErgodic);
        assert!(c.rate >= 0.05);
        assert!(c.margin >= 1e-9);
        assert!(matches!(
            optimize_rate(&SystemParams::new(1.0, 2.0, 1.0).unwrap()),
            Err(Error::NoCertificate)
        ));
    }

    #[test]
    fn null_bound_examples() {
        let p = null_demo();
        let c = RateCertificate::from_weights(&p, 0.75, 0.5).unwrap();
        assert!((null_bound(&p, &c, 7, 7, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let v0 = null_bound(&p, &c, 21, 5, 0.0).unwrap();
        assert!((v0 / 0.375f64.powi(8) - 1.0).abs() < 1e-12);
        let v4 = null_bound(&p, &c, 21, 5, 4.0).unwrap();
        assert!((v4 / (v0 * (-1f64).exp()) - 1.0).abs() < 1e-12);
        assert!(null_bound(&p, &c, 0, 5, 0.0).is_err());
        assert!(null_bound(&p, &c, 3, 5, -1.0).is_err());
        let e = RateCertificate::from_weights(&erg_demo(), 10.0 / 7.0, 1.05).unwrap();
        assert!(null_bound(&erg_demo(), &e, 3, 5, 0.0).is_err());
        // A certificate computed for other rates is refused.
        assert!(null_bound(&p.scaled(2.0).unwrap(), &c, 3, 5, 0.0).is_err());
    }

    #[test]
    fn erg_bound_basics() {
        let p = erg_demo();
        let c = RateCertificate::from_weights(&p, 10.0 / 7.0, 1.05).unwrap();
        let n = 60;
        let mut pi: Vec<f64> = (0..n).map(|i| 0.05f64.powi(i as i32 / 2)).collect();
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|v| *v /= total);
        let b = erg_bound(&p, &c, &pi, &pi, 3.0).unwrap();
        assert_eq!(b.value, 0.0);
        assert_eq!(b.tail_residual, 0.0);

        let mut p0 = vec![0.0; n];
        p0[0] = 1.0;
        let w = c.erg_weights().unwrap();
        let direct: f64 = (1..n).map(|i| w.g(i as u64 + 1) * pi[i]).sum();
        let b0 = erg_bound(&p, &c, &p0, &pi, 0.0).unwrap();
        assert!((b0.value / (4.0 * direct) - 1.0).abs() < 1e-12);

        let t = 7.0;
        let full = erg_bound(&p, &c, &p0, &pi, t).unwrap().value;
        let half = erg_bound(&p, &c, &p0, &pi, t / 2.0).unwrap().value;
        assert!((half / full - (c.rate * t / 2.0).exp()).abs() < 1e-12);

        let fat = vec![1.0 / n as f64; n];
        assert!(matches!(erg_bound(&p, &c, &p0, &fat, 0.0), Err(Error::UnreliableBound { .. })));
        assert!(erg_bound(&p, &c, &p0[..10], &pi, 0.0).is_err());
    }
}
