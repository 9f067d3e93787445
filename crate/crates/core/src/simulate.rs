//! Exact event-driven simulation of the retrial queue.
//!
//! Each path draws an exponential holding time with the total exit rate of
//! its current state and then picks the jump proportionally to its rate.
//! Path `i` owns the ChaCha stream `i` under the run seed, so results do
//! not depend on how paths are scheduled across threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{state_to_index, QueueState, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// Arrival to an idle server.
    ArrivalServed,
    /// Arrival to a busy server, joining the orbit.
    ArrivalBlocked,
    Service,
    /// Successful retrial of the head-of-orbit customer.
    Retrial,
}

/// Next states reachable from `state` with their rates.
pub fn step_distribution(state: QueueState, params: &SystemParams) -> Vec<(QueueState, f64)> {
    let n = state.orbit;
    match (state.server, n) {
        (0, 0) => vec![(QueueState::busy(0), params.lambda)],
        (0, _) => vec![(QueueState::busy(n), params.lambda), (QueueState::busy(n - 1), params.mu0)],
        _ => vec![(QueueState::busy(n + 1), params.lambda), (QueueState::idle(n), params.mu)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    /// Time of the jump.
    pub t: f64,
    /// Time spent in `from` before the jump.
    pub holding: f64,
    pub from: QueueState,
    pub to: QueueState,
    pub kind: EventKind,
}

pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// One trajectory of the queue.
#[derive(Debug, Clone)]
pub struct PathSimulator {
    params: SystemParams,
    state: QueueState,
    t: f64,
    path: u64,
    rng: ChaCha8Rng,
}

impl PathSimulator {
    pub fn new(params: SystemParams, initial: QueueState, seed: u64, path: u64) -> Self {
        Self { params, state: initial, t: 0.0, path, rng: path_rng(seed, path) }
    }

    pub fn state(&self) -> QueueState {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn next_jump(&mut self) -> Result<Jump> {
        let SystemParams { lambda, mu, mu0 } = self.params;
        let from = self.state;
        let other = match (from.server, from.orbit) {
            (0, 0) => 0.0,
            (0, _) => mu0,
            _ => mu,
        };
        let total = lambda + other;
        let u: f64 = self.rng.gen();
        let holding = -(1.0 - u).ln() / total;
        let pick: f64 = self.rng.gen::<f64>() * total;
        let (to, kind) = if pick < lambda {
            if from.server == 0 {
                (QueueState::busy(from.orbit), EventKind::ArrivalServed)
            } else {
                let orbit = from.orbit.checked_add(1).ok_or(Error::OrbitOverflow { path: self.path })?;
                (QueueState::busy(orbit), EventKind::ArrivalBlocked)
            }
        } else if from.server == 1 {
            (QueueState::idle(from.orbit), EventKind::Service)
        } else {
            (QueueState::busy(from.orbit - 1), EventKind::Retrial)
        };
        self.t += holding;
        self.state = to;
        Ok(Jump { t: self.t, holding, from, to, kind })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub paths: u64,
    pub seed: u64,
    pub initial: QueueState,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.paths == 0 {
            return Err(Error::domain("at least one path is required"));
        }
        QueueState::new(self.initial.server, self.initial.orbit).map(|_| ())
    }
}

/// Counts of path states at one observation time.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub t: f64,
    pub paths: u64,
    pub counts: BTreeMap<QueueState, u64>,
}

impl EmpiricalDistribution {
    pub fn probability(&self, s: QueueState) -> f64 {
        self.counts.get(&s).copied().unwrap_or(0) as f64 / self.paths as f64
    }

    /// Binomial standard error of [`probability`](Self::probability).
    pub fn stderr(&self, s: QueueState) -> f64 {
        let p = self.probability(s);
        (p * (1.0 - p) / self.paths as f64).sqrt()
    }

    pub fn mean_orbit(&self) -> f64 {
        let total: f64 = self.counts.iter().map(|(s, &c)| s.orbit as f64 * c as f64).sum();
        total / self.paths as f64
    }

    /// Probabilities by state index `1..=m`, plus the mass beyond `m`.
    pub fn by_index(&self, m: usize) -> (Vec<f64>, f64) {
        let mut probs = vec![0.0; m];
        let mut beyond = 0.0;
        for (&s, &c) in &self.counts {
            let p = c as f64 / self.paths as f64;
            match usize::try_from(state_to_index(s)) {
                Ok(i) if i <= m => probs[i - 1] += p,
                _ => beyond += p,
            }
        }
        (probs, beyond)
    }

    /// Total-variation distance to a distribution over states `1..=len`.
    pub fn total_variation(&self, probs: &[f64]) -> f64 {
        let (emp, beyond) = self.by_index(probs.len());
        0.5 * (emp.iter().zip(probs).map(|(a, b)| (a - b).abs()).sum::<f64>() + beyond)
    }
}

/// Empirical state distributions at each of `observe_at` from
/// `cfg.paths` independent trajectories.
pub fn simulate_paths(params: &SystemParams, cfg: &SimConfig, observe_at: &[f64]) -> Result<Vec<EmpiricalDistribution>> {
    cfg.validate()?;
    if observe_at.windows(2).any(|w| !(w[0] <= w[1])) || observe_at.iter().any(|&t| !(0.0..=cfg.horizon).contains(&t)) {
        return Err(Error::domain("observation times must be ascending and within [0, horizon]"));
    }
    let per_path: Vec<Vec<QueueState>> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| observe_path(params, cfg, i, observe_at))
        .collect::<Result<_>>()?;

    let mut out: Vec<EmpiricalDistribution> = observe_at
        .iter()
        .map(|&t| EmpiricalDistribution { t, paths: cfg.paths, counts: BTreeMap::new() })
        .collect();
    for states in &per_path {
        for (dist, s) in out.iter_mut().zip(states) {
            *dist.counts.entry(*s).or_insert(0) += 1;
        }
    }
    Ok(out)
}

fn observe_path(params: &SystemParams, cfg: &SimConfig, path: u64, observe_at: &[f64]) -> Result<Vec<QueueState>> {
    let mut sim = PathSimulator::new(*params, cfg.initial, cfg.seed, path);
    let mut seen = Vec::with_capacity(observe_at.len());
    let mut pending = observe_at.iter().copied().peekable();
    while pending.peek().is_some() {
        let before = sim.state();
        let jump = sim.next_jump()?;
        // State at t is the one after the last jump at or before t.
        while let Some(&t) = pending.peek() {
            if t < jump.t {
                seen.push(before);
                pending.next();
            } else {
                break;
            }
        }
    }
    Ok(seen)
}

/// CSV rows `t,server,orbit,count,probability,stderr`.
pub fn distributions_to_csv(dists: &[EmpiricalDistribution]) -> String {
    let mut out = String::from("t,server,orbit,count,probability,stderr\n");
    for d in dists {
        for (&s, &c) in &d.counts {
            writeln!(
                out,
                "{:.14e},{},{},{},{:.14e},{:.14e}",
                d.t,
                s.server,
                s.orbit,
                c,
                d.probability(s),
                d.stderr(s)
            )
            .unwrap();
        }
    }
    out
}
