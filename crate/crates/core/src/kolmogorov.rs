//! Transient and stationary distributions of the truncated chain.
//!
//! The forward equations `dp/dt = A_M p` are integrated with the classical
//! fourth-order Runge–Kutta scheme. The local error of every step is
//! estimated by step doubling and the step is halved until it meets the
//! tolerance; the accepted value is the Richardson-extrapolated one. Since the truncated `Q` conserves probability, the columns of
//! `A_M` sum to zero and every Runge–Kutta stage preserves total mass.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::banded::BandMatrix;
use crate::ergodicity::{classify, Regime};
use crate::error::{Error, Result};
use crate::model::{build_generator, GeneratorKind, SystemParams, TruncatedGenerator};

pub const DEFAULT_TRUNCATION: usize = 400;
pub const MAX_TRUNCATION: usize = 25_600;
/// Number of highest-index states whose mass counts as leaked.
pub const BOUNDARY_STATES: usize = 4;
pub const LEAK_LIMIT: f64 = 1e-6;
pub const TAIL_LIMIT: f64 = 1e-10;
/// Roundoff negatives above this are clipped; below it the solve aborts.
const NEGATIVE_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSnapshot {
    pub t: f64,
    /// `probs[i]` is the probability of state `i + 1`.
    pub probs: Vec<f64>,
    /// Mass on the [`BOUNDARY_STATES`] highest-index states.
    pub leak: f64,
}

impl DistributionSnapshot {
    pub fn new(t: f64, probs: Vec<f64>) -> Self {
        let leak = boundary_mass(&probs);
        Self { t, probs, leak }
    }

    /// All mass on state `index` (1-based) of an `m`-state truncation.
    pub fn point_mass(m: usize, index: usize) -> Result<Self> {
        if index < 1 || index > m {
            return Err(Error::domain(format!("state {index} outside 1..={m}")));
        }
        let mut probs = vec![0.0; m];
        probs[index - 1] = 1.0;
        Ok(Self::new(0.0, probs))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn boundary_mass(probs: &[f64]) -> f64 {
    probs.iter().rev().take(BOUNDARY_STATES).map(|p| p.abs()).sum()
}

/// `Σ |p_i - q_i|`.
pub fn l1_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::domain(format!("length mismatch: {} vs {}", p.len(), q.len())));
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientOptions {
    /// Truncation size `M`.
    pub truncation: usize,
    /// Local error tolerance per step, l1.
    pub tol: f64,
    /// Optional cap on the step size; the default is `0.1 / ‖A‖`.
    pub max_step: Option<f64>,
}

impl Default for TransientOptions {
    fn default() -> Self {
        Self { truncation: DEFAULT_TRUNCATION, tol: 1e-12, max_step: None }
    }
}

struct Rk4 {
    a: TruncatedGenerator,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(a: TruncatedGenerator) -> Self {
        let n = a.size();
        Self { a, k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    fn step(&mut self, y: &[f64], h: f64, out: &mut [f64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        self.a.mul_vec(y, k1);
        for ((t, yi), ki) in self.tmp.iter_mut().zip(y).zip(k1.iter()) {
            *t = yi + 0.5 * h * ki;
        }
        self.a.mul_vec(&self.tmp, k2);
        for ((t, yi), ki) in self.tmp.iter_mut().zip(y).zip(k2.iter()) {
            *t = yi + 0.5 * h * ki;
        }
        self.a.mul_vec(&self.tmp, k3);
        for ((t, yi), ki) in self.tmp.iter_mut().zip(y).zip(k3.iter()) {
            *t = yi + h * ki;
        }
        self.a.mul_vec(&self.tmp, k4);
        for (i, o) in out.iter_mut().enumerate() {
            *o = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Distributions at each of `times`, starting from `p0` at time `p0.t`.
pub fn transient(
    params: &SystemParams,
    p0: &DistributionSnapshot,
    times: &[f64],
    opts: &TransientOptions,
) -> Result<Vec<DistributionSnapshot>> {
    let m = opts.truncation;
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if p0.probs.len() > m {
        return Err(Error::domain(format!(
            "initial distribution has {} states, truncation is {m}",
            p0.probs.len()
        )));
    }
    if p0.probs.iter().any(|&p| !(p >= 0.0)) || (p0.total() - 1.0).abs() > 1e-8 {
        return Err(Error::domain("initial distribution is not stochastic"));
    }
    let support = p0.probs.iter().rposition(|&p| p > 0.0).map_or(0, |i| i + 1);
    if support > m / 2 {
        return Err(Error::domain(format!(
            "initial support reaches state {support}, more than half of the truncation {m}"
        )));
    }
    if times.windows(2).any(|w| !(w[0] <= w[1])) || times.first().is_some_and(|&t| !(t >= p0.t) || t < 0.0) {
        return Err(Error::domain("observation times must be ascending, non-negative and not before p0.t"));
    }

    let a = build_generator(params, m, GeneratorKind::A)?;
    let h_max = (0.1 / params.generator_norm()).min(opts.max_step.unwrap_or(f64::INFINITY));
    let mut rk = Rk4::new(a);

    let mut y = p0.probs.clone();
    y.resize(m, 0.0);
    let mut full = vec![0.0; m];
    let mut half = vec![0.0; m];
    let mut two_halves = vec![0.0; m];
    let mut t = p0.t;
    let mut h = h_max;
    let mut out = Vec::with_capacity(times.len());

    for &target in times {
        while t < target {
            let remaining = target - t;
            let mut step = h.min(remaining);
            loop {
                rk.step(&y, step, &mut full);
                rk.step(&y, 0.5 * step, &mut half);
                rk.step(&half, 0.5 * step, &mut two_halves);
                let err = l1_distance(&full, &two_halves)? / 15.0;
                if err <= opts.tol {
                    if err < opts.tol / 32.0 && step == h {
                        h = (2.0 * h).min(h_max);
                    }
                    break;
                }
                step *= 0.5;
                h = step;
                if step < 1e-12 * h_max {
                    return Err(Error::Integration(format!("step size underflow at t = {t}")));
                }
            }
            // Local extrapolation; weights sum to one, so mass is kept.
            for ((yi, &f), &th) in y.iter_mut().zip(&full).zip(&two_halves) {
                *yi = th + (th - f) / 15.0;
            }
            t = if step == remaining { target } else { t + step };
        }
        let snap = finish_snapshot(target, &mut y)?;
        if snap.leak > LEAK_LIMIT {
            return Err(Error::TruncationTooSmall { mass: snap.leak, limit: LEAK_LIMIT, suggested: 2 * m });
        }
        out.push(snap);
    }
    Ok(out)
}

fn finish_snapshot(t: f64, y: &mut [f64]) -> Result<DistributionSnapshot> {
    let mut clipped = false;
    for v in y.iter_mut() {
        if *v < 0.0 {
            if *v < NEGATIVE_FLOOR {
                return Err(Error::Integration(format!("probability {v:e} at t = {t}")));
            }
            *v = 0.0;
            clipped = true;
        }
    }
    if clipped {
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
    }
    let total: f64 = y.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Integration(format!("total mass {total} at t = {t}")));
    }
    Ok(DistributionSnapshot::new(t, y.to_vec()))
}

/// Stationary distribution of the `m`-state truncation, doubling `m` until
/// the mass on the top [`BOUNDARY_STATES`] states is at most [`TAIL_LIMIT`].
///
/// The balance equation of state 1 is dropped and `π_1` is fixed at 1; the
/// remaining banded system is solved and the result normalized. The `leak`
/// of the returned snapshot is its tail mass.
pub fn stationary(params: &SystemParams, m: usize, tol: f64) -> Result<DistributionSnapshot> {
    match classify(params) {
        Regime::ExponentiallyErgodic => {}
        Regime::Critical => return Err(Error::NoCertificate),
        actual => return Err(Error::Regime { expected: "ExponentiallyErgodic", actual }),
    }
    if m < 8 {
        return Err(Error::domain(format!("truncation must be at least 8, got {m}")));
    }
    let mut size = m;
    loop {
        let a = build_generator(params, size, GeneratorKind::A)?;
        let pi = solve_stationary(&a)?;
        let mut r = vec![0.0; size];
        a.mul_vec(&pi, &mut r);
        let residual: f64 = r.iter().map(|v| v.abs()).sum();
        if residual > tol {
            return Err(Error::Residual { residual, tol });
        }
        let snap = DistributionSnapshot::new(f64::INFINITY, pi);
        if snap.leak <= TAIL_LIMIT {
            return Ok(snap);
        }
        if size >= MAX_TRUNCATION {
            return Err(Error::NoConvergence { tail: snap.leak, cap: MAX_TRUNCATION });
        }
        size = (2 * size).min(MAX_TRUNCATION);
    }
}

fn solve_stationary(a: &TruncatedGenerator) -> Result<Vec<f64>> {
    let m = a.size();
    let (lower, upper) = a.bandwidth();
    let mut band = BandMatrix::zeros(m - 1, lower, upper);
    let mut rhs = vec![0.0; m - 1];
    for i in 2..=m {
        for (j, v) in a.row(i) {
            if j == 1 {
                rhs[i - 2] = -v;
            } else {
                band.set(i - 2, j - 2, v);
            }
        }
    }
    band.solve_in_place(&mut rhs)?;
    let mut pi = Vec::with_capacity(m);
    pi.push(1.0);
    pi.extend(rhs.into_iter().map(|v| v.max(0.0)));
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

/// CSV with header `t,leak,p1,...,pM`, 15 significant digits.
pub fn snapshots_to_csv(snaps: &[DistributionSnapshot]) -> String {
    let m = snaps.iter().map(|s| s.probs.len()).max().unwrap_or(0);
    let mut out = String::from("t,leak");
    for i in 1..=m {
        write!(out, ",p{i}").unwrap();
    }
    out.push('\n');
    for s in snaps {
        write!(out, "{},{:.14e}", fmt_time(s.t), s.leak).unwrap();
        for i in 0..m {
            write!(out, ",{:.14e}", s.probs.get(i).copied().unwrap_or(0.0)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub(crate) fn fmt_time(t: f64) -> String {
    if t.is_infinite() {
        "inf".to_string()
    } else {
        format!("{t:.14e}")
    }
}
