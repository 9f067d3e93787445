//! Queue parameters, the state enumeration and finite slices of the
//! intensity matrix.
//!
//! States are pairs `(server, orbit)` with `server ∈ {0, 1}`. They are laid
//! out on a line with 1-based indices:
//!
//! ```text
//! (0, n) -> 2n + 1
//! (1, n) -> 2n + 2
//! ```
//!
//! so that index 1 is the empty system and index 2 is "server busy, orbit
//! empty". Under this layout the generator has nonzeros only at offsets
//! `-1, +1, +2` from the diagonal.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arrival rate `lambda`, service rate `mu` and retrial rate `mu0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub lambda: f64,
    pub mu: f64,
    pub mu0: f64,
}

impl SystemParams {
    pub fn new(lambda: f64, mu: f64, mu0: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("mu", mu), ("mu0", mu0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { lambda, mu, mu0 })
    }

    /// Multiplies every rate by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.lambda * c, self.mu * c, self.mu0 * c)
    }

    /// Column-sum norm of the untruncated `A = Qᵀ`: `2λ + 2·max(μ, μ₀)`.
    pub fn generator_norm(&self) -> f64 {
        2.0 * self.lambda + 2.0 * self.mu.max(self.mu0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QueueState {
    /// 1 if the server is busy.
    pub server: u8,
    pub orbit: u64,
}

impl QueueState {
    pub const EMPTY: QueueState = QueueState { server: 0, orbit: 0 };

    pub fn new(server: u8, orbit: u64) -> Result<Self> {
        if server > 1 {
            return Err(Error::domain(format!("server occupancy must be 0 or 1, got {server}")));
        }
        Ok(Self { server, orbit })
    }

    pub fn idle(orbit: u64) -> Self {
        Self { server: 0, orbit }
    }

    pub fn busy(orbit: u64) -> Self {
        Self { server: 1, orbit }
    }
}

impl fmt::Display for QueueState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.server, self.orbit)
    }
}

pub fn state_to_index(s: QueueState) -> u64 {
    2 * s.orbit + 1 + u64::from(s.server)
}

pub fn index_to_state(i: u64) -> Result<QueueState> {
    if i < 1 {
        return Err(Error::domain("state indices start at 1"));
    }
    let z = i - 1;
    Ok(QueueState {
        server: (z % 2) as u8,
        orbit: z / 2,
    })
}

/// Out-transitions `(target index, rate)` of state `i` in the infinite chain.
pub fn transition_rates(params: &SystemParams, i: u64) -> Result<Vec<(u64, f64)>> {
    let s = index_to_state(i)?;
    let out = match (s.server, s.orbit) {
        (0, 0) => vec![(state_to_index(QueueState::busy(0)), params.lambda)],
        (0, n) => vec![
            (state_to_index(QueueState::busy(n - 1)), params.mu0),
            (state_to_index(QueueState::busy(n)), params.lambda),
        ],
        (_, n) => vec![
            (state_to_index(QueueState::idle(n)), params.mu),
            (state_to_index(QueueState::busy(n + 1)), params.lambda),
        ],
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// The intensity matrix itself.
    Q,
    /// `Qᵀ`, the matrix of the forward equations `dp/dt = A p`.
    A,
    /// The reduced matrix of the system for `(p_2, p_3, ...)` obtained by
    /// eliminating `p_1 = 1 - Σ_{i≥2} p_i`.
    B,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeneratorKind::Q => "Q",
            GeneratorKind::A => "A",
            GeneratorKind::B => "B",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "q" => Ok(GeneratorKind::Q),
            "A" | "a" => Ok(GeneratorKind::A),
            "B" | "b" => Ok(GeneratorKind::B),
            other => Err(Error::domain(format!("unknown generator kind {other:?}"))),
        }
    }
}

/// A finite slice of `Q`, `A` or `B`, stored row-wise with 0-based columns.
///
/// The public accessors use 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedGenerator {
    kind: GeneratorKind,
    rows: Vec<Vec<(usize, f64)>>,
}

impl TruncatedGenerator {
    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 1 && j >= 1 && i <= self.size() && j <= self.size());
        self.rows[i - 1]
            .iter()
            .find(|&&(c, _)| c == j - 1)
            .map_or(0.0, |&(_, v)| v)
    }

    /// Nonzeros of row `i` (1-based) as `(column, value)` with 1-based columns.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows[i - 1].iter().map(|&(c, v)| (c + 1, v))
    }

    /// All nonzeros in row-major order, 1-based.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r + 1, c + 1, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> TruncatedGenerator {
        let kind = match self.kind {
            GeneratorKind::Q => GeneratorKind::A,
            GeneratorKind::A => GeneratorKind::Q,
            GeneratorKind::B => GeneratorKind::B,
        };
        let mut rows = vec![Vec::new(); self.size()];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                rows[c].push((r, v));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
        }
        TruncatedGenerator { kind, rows }
    }

    /// `y = self · x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.size());
        assert_eq!(y.len(), self.size());
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    /// `(lower, upper)` bandwidth over the stored nonzeros.
    pub fn bandwidth(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, _) in row {
                if c > r {
                    upper = upper.max(c - r);
                } else {
                    lower = lower.max(r - c);
                }
            }
        }
        (lower, upper)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut out = vec![vec![0.0; n]; n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[r][c] = v;
            }
        }
        out
    }

    /// Coordinate-list text: a `kind M` header and one `i j rate` line per
    /// nonzero, 1-based, 17 significant digits.
    pub fn to_coo_string(&self) -> String {
        let mut out = format!("{} {}\n", self.kind, self.size());
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i} {j} {v:.16e}").expect("writing to a String");
        }
        out
    }

    pub fn from_coo_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::domain("empty coordinate list"))?;
        let mut parts = header.split_whitespace();
        let kind: GeneratorKind = parts
            .next()
            .ok_or_else(|| Error::domain("missing kind in header"))?
            .parse()?;
        let size: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::domain("missing or invalid size in header"))?;
        let mut rows = vec![Vec::new(); size];
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let parse_err = || Error::domain(format!("malformed entry line {line:?}"));
            if f.len() != 3 {
                return Err(parse_err());
            }
            let i: usize = f[0].parse().map_err(|_| parse_err())?;
            let j: usize = f[1].parse().map_err(|_| parse_err())?;
            let v: f64 = f[2].parse().map_err(|_| parse_err())?;
            if i == 0 || j == 0 || i > size || j > size {
                return Err(Error::domain(format!("index out of range in {line:?}")));
            }
            rows[i - 1].push((j - 1, v));
        }
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
        }
        Ok(TruncatedGenerator { kind, rows })
    }
}

/// Truncated `Q`, `A` or `B` over the first `m` states.
///
/// For `Q` and `A` the arrival transitions of the two highest-index states
/// are removed and the diagonal adjusted, so every row of `Q` still sums to
/// zero. `B` is `(m-1)×(m-1)` with `b_ij = a_{i+1,j+1} - a_{i+1,1}`.
pub fn build_generator(params: &SystemParams, m: usize, kind: GeneratorKind) -> Result<TruncatedGenerator> {
    if m < 4 {
        return Err(Error::domain(format!("truncation size must be at least 4, got {m}")));
    }
    let q = build_q(params, m);
    Ok(match kind {
        GeneratorKind::Q => q,
        GeneratorKind::A => q.transpose(),
        GeneratorKind::B => reduce(&q.transpose()),
    })
}

fn build_q(params: &SystemParams, m: usize) -> TruncatedGenerator {
    let mut rows = Vec::with_capacity(m);
    for i in 1..=m {
        let boundary = i + 2 > m;
        let mut out: Vec<(usize, f64)> = transition_rates(params, i as u64)
            .expect("index >= 1")
            .into_iter()
            // Only arrivals move to a higher index.
            .filter(|&(target, _)| !(boundary && target > i as u64) && target <= m as u64)
            .map(|(target, rate)| (target as usize - 1, rate))
            .collect();
        let exit: f64 = out.iter().map(|&(_, r)| r).sum();
        out.push((i - 1, -exit));
        out.sort_by_key(|&(c, _)| c);
        rows.push(out);
    }
    TruncatedGenerator { kind: GeneratorKind::Q, rows }
}

fn reduce(a: &TruncatedGenerator) -> TruncatedGenerator {
    let n = a.size() - 1;
    let mut rows = Vec::with_capacity(n);
    for i in 1..a.size() {
        let a_i1 = a.rows[i].iter().find(|&&(c, _)| c == 0).map_or(0.0, |&(_, v)| v);
        let row: Vec<(usize, f64)> = if a_i1 == 0.0 {
            a.rows[i]
                .iter()
                .filter(|&&(c, _)| c > 0)
                .map(|&(c, v)| (c - 1, v))
                .collect()
        } else {
            let mut dense = vec![-a_i1; n];
            for &(c, v) in a.rows[i].iter().filter(|&&(c, _)| c > 0) {
                dense[c - 1] += v;
            }
            dense
                .into_iter()
                .enumerate()
                .filter(|&(_, v)| v != 0.0)
                .collect()
        };
        rows.push(row);
    }
    TruncatedGenerator { kind: GeneratorKind::B, rows }
}
