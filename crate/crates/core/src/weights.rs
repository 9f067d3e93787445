//! Geometric weight sequences and weighted-l1 logarithmic norms.
//!
//! In l1 the logarithmic norm of a matrix `C` is the largest column value
//! `c_jj + Σ_{i≠j} |c_ij|`. Two weightings are used:
//!
//! * [`NullWeights`]: a decreasing diagonal `Δ = diag(δ_1, δ_2, ...)`, giving
//!   `γ(A)_{1Δ} = γ(Δ A Δ⁻¹)_1` for the forward matrix `A`;
//! * [`ErgWeights`]: the upper-triangular `D` whose row `i` holds `d_i` from
//!   the diagonal rightwards, giving `γ(B)_{1D} = γ(D B D⁻¹)_1` for the
//!   reduced matrix `B`. The prefix sums `g_i` of `d` enter the ergodic
//!   distance bound.
//!
//! The `*_analytic` functions are the closed forms for the infinite chain;
//! [`lognorm_numeric`] forms the weighted matrix explicitly from a truncated
//! generator and serves as their oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GeneratorKind, SystemParams, TruncatedGenerator};

/// Indices above this are evaluated through logarithms.
const DIRECT_EVAL_LIMIT: u64 = 200;

/// `δ_1 = 1`, `δ_{2k} = b·δ_{2k-1}`, `δ_{2k+1} = a·δ_{2k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullWeights {
    a: f64,
    b: f64,
}

impl NullWeights {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
            return Err(Error::domain(format!("null weights need a, b in (0, 1), got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn ln_delta(&self, k: u64) -> f64 {
        assert!(k >= 1, "weights are indexed from 1");
        let (la, lb) = (self.a.ln(), self.b.ln());
        let m = (k / 2) as f64;
        if k % 2 == 1 {
            m * (la + lb)
        } else {
            (m - 1.0) * la + m * lb
        }
    }

    pub fn delta(&self, k: u64) -> f64 {
        assert!(k >= 1, "weights are indexed from 1");
        if k > DIRECT_EVAL_LIMIT {
            return self.ln_delta(k).exp();
        }
        let m = (k / 2) as i32;
        if k % 2 == 1 {
            (self.a * self.b).powi(m)
        } else {
            self.a.powi(m - 1) * self.b.powi(m)
        }
    }

    /// `δ_i / δ_j`.
    pub fn ratio(&self, i: u64, j: u64) -> f64 {
        if i.max(j) <= DIRECT_EVAL_LIMIT {
            self.delta(i) / self.delta(j)
        } else {
            (self.ln_delta(i) - self.ln_delta(j)).exp()
        }
    }
}

/// `d_2 = 1`, `d_{2k+1} = b·d_{2k}`, `d_{2k+2} = a·d_{2k+1}`, with prefix
/// sums `g_i = Σ_{n=2}^{i} d_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgWeights {
    a: f64,
    b: f64,
}

impl ErgWeights {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() && a * b > 1.0) {
            return Err(Error::domain(format!("ergodic weights need a, b > 0 with a*b > 1, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn ln_d(&self, i: u64) -> f64 {
        assert!(i >= 2, "ergodic weights are indexed from 2");
        let lx = (self.a * self.b).ln();
        let k = (i / 2) as f64;
        if i % 2 == 0 {
            (k - 1.0) * lx
        } else {
            self.b.ln() + (k - 1.0) * lx
        }
    }

    pub fn d(&self, i: u64) -> f64 {
        assert!(i >= 2, "ergodic weights are indexed from 2");
        if i > DIRECT_EVAL_LIMIT {
            return self.ln_d(i).exp();
        }
        let k = (i / 2) as i32;
        let x = self.a * self.b;
        if i % 2 == 0 {
            x.powi(k - 1)
        } else {
            self.b * x.powi(k - 1)
        }
    }

    /// `d_i / d_j`.
    pub fn ratio(&self, i: u64, j: u64) -> f64 {
        if i.max(j) <= DIRECT_EVAL_LIMIT {
            self.d(i) / self.d(j)
        } else {
            (self.ln_d(i) - self.ln_d(j)).exp()
        }
    }

    /// `ln Σ_{j=0}^{n-1} x^j` for `x = ab > 1`; `-inf` when `n = 0`.
    fn ln_geometric(&self, n: u64) -> f64 {
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        let x = self.a * self.b;
        let lx = x.ln();
        let y = n as f64 * lx;
        // ln((x^n - 1)/(x - 1)) = ln(1 - e^{-y}) + y - ln(x - 1)
        (-(-y).exp_m1()).ln() + y - (x - 1.0).ln()
    }

    pub fn ln_g(&self, i: u64) -> f64 {
        assert!(i >= 2, "ergodic weights are indexed from 2");
        let k = i / 2;
        if i % 2 == 1 {
            self.b.ln_1p() + self.ln_geometric(k)
        } else {
            ln_add_exp(self.ln_geometric(k), self.b.ln() + self.ln_geometric(k - 1))
        }
    }

    pub fn g(&self, i: u64) -> f64 {
        if i <= DIRECT_EVAL_LIMIT {
            (2..=i).map(|n| self.d(n)).sum()
        } else {
            self.ln_g(i).exp()
        }
    }
}

fn ln_add_exp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// The column values of `Δ A Δ⁻¹` for the infinite chain: column 1, the
/// busy columns and the idle columns with a nonempty orbit, each negated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullComponents {
    /// `λ(1 - b)`, column 1.
    pub empty: f64,
    /// `λ(1 - ab) - μ(b⁻¹ - 1)`.
    pub busy: f64,
    /// `λ(1 - b) - μ₀(a⁻¹ - 1)`.
    pub idle: f64,
}

impl NullComponents {
    pub fn new(params: &SystemParams, a: f64, b: f64) -> Result<Self> {
        check_positive(a, b)?;
        let SystemParams { lambda, mu, mu0 } = *params;
        Ok(Self {
            empty: lambda * (1.0 - b),
            busy: lambda * (1.0 - a * b) - mu * (1.0 / b - 1.0),
            idle: lambda * (1.0 - b) - mu0 * (1.0 / a - 1.0),
        })
    }

    /// `min(busy, idle)`, the rate `ζ` certified by `(a, b)`.
    pub fn rate(&self) -> f64 {
        self.busy.min(self.idle)
    }
}

/// The values `α_i` whose infimum is `-γ(B)_{1D}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgComponents {
    /// `α_2 = λ + μ - λ(b + ab)`.
    pub alpha2: f64,
    /// `α_{2k+1} = λ + μ₀ - μ b⁻¹`.
    pub alpha_odd: f64,
    /// `α_{2k+2} = λ + μ - λ(b + ab) - μ₀ a⁻¹`.
    pub alpha_even: f64,
}

impl ErgComponents {
    pub fn new(params: &SystemParams, a: f64, b: f64) -> Result<Self> {
        check_positive(a, b)?;
        let SystemParams { lambda, mu, mu0 } = *params;
        let alpha2 = lambda + mu - lambda * (b + a * b);
        Ok(Self {
            alpha2,
            alpha_odd: lambda + mu0 - mu / b,
            alpha_even: alpha2 - mu0 / a,
        })
    }

    /// `min(α_odd, α_even)`, the rate `α` certified by `(a, b)`.
    pub fn rate(&self) -> f64 {
        self.alpha_odd.min(self.alpha_even)
    }
}

fn check_positive(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && b > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("weight parameters must be positive, got a = {a}, b = {b}")))
    }
}

/// `γ(A)_{1Δ}` for the infinite chain.
///
/// All three column families are included; when `a ≤ 1` the column-1 term
/// `λ(1-b)` never attains the minimum and this is `-min(busy, idle)`.
pub fn lognorm_null_analytic(params: &SystemParams, a: f64, b: f64) -> Result<f64> {
    let c = NullComponents::new(params, a, b)?;
    Ok(-c.empty.min(c.busy).min(c.idle))
}

/// `γ(B)_{1D} = -min(α_2, α_odd, α_even)` for the infinite chain.
pub fn lognorm_erg_analytic(params: &SystemParams, a: f64, b: f64) -> Result<f64> {
    let c = ErgComponents::new(params, a, b)?;
    Ok(-c.alpha2.min(c.alpha_odd).min(c.alpha_even))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    Unit,
    Null(NullWeights),
    Erg(ErgWeights),
}

/// Smallest truncation accepted by [`lognorm_numeric`].
pub const MIN_NUMERIC_SIZE: usize = 8;

/// l1 logarithmic norm of the weighted truncated matrix, maximized over the
/// interior columns `1..=size-3` only.
///
/// * `Unit`: the matrix as given (any kind).
/// * `Null`: `Δ A Δ⁻¹`; requires kind `A`.
/// * `Erg`: `D B D⁻¹` with `D` upper triangular; requires kind `B`. Row and
///   column `i` of `B` carry the weight `d_{i+1}`.
pub fn lognorm_numeric(matrix: &TruncatedGenerator, weights: &Weighting) -> Result<f64> {
    let n = matrix.size();
    if n < MIN_NUMERIC_SIZE {
        return Err(Error::domain(format!(
            "numeric log norm needs at least {MIN_NUMERIC_SIZE} states, got {n}"
        )));
    }
    let interior = 1..=n - 3;
    // Rows of the transpose are columns of the matrix.
    let cols = matrix.transpose();
    match weights {
        Weighting::Unit => Ok(interior
            .map(|j| column_value(j, cols.row(j), |_| 1.0))
            .fold(f64::NEG_INFINITY, f64::max)),
        Weighting::Null(w) => {
            if matrix.kind() != GeneratorKind::A {
                return Err(Error::domain(format!("null weights apply to kind A, got {}", matrix.kind())));
            }
            Ok(interior
                .map(|j| column_value(j, cols.row(j), |i| w.ratio(i as u64, j as u64)))
                .fold(f64::NEG_INFINITY, f64::max))
        }
        Weighting::Erg(w) => {
            if matrix.kind() != GeneratorKind::B {
                return Err(Error::domain(format!("ergodic weights apply to kind B, got {}", matrix.kind())));
            }
            Ok(interior
                .map(|j| triangular_column_value(&cols, j, w))
                .fold(f64::NEG_INFINITY, f64::max))
        }
    }
}

/// `c_jj + Σ_{i≠j} |c_ij|` for a column given by `(row, value)` pairs and a
/// row-scaling `scale(i)`.
fn column_value(j: usize, column: impl Iterator<Item = (usize, f64)>, scale: impl Fn(usize) -> f64) -> f64 {
    column
        .map(|(i, v)| if i == j { v } else { (scale(i) * v).abs() })
        .sum()
}

/// Column `j` of `D B D⁻¹`.
///
/// `D = diag(d) U` with `U` the upper all-ones matrix, so
/// `D B D⁻¹ = diag(d) · (U B U⁻¹) · diag(d)⁻¹` and
/// `(U B U⁻¹)_ij = Σ_{k≥i} (b_kj - b_{k,j-1})`.
fn triangular_column_value(cols: &TruncatedGenerator, j: usize, w: &ErgWeights) -> f64 {
    let mut diff = vec![0.0; j.max(1)];
    let mut last = 0;
    for (i, v) in cols.row(j) {
        if i > diff.len() {
            diff.resize(i, 0.0);
        }
        diff[i - 1] += v;
        last = last.max(i);
    }
    if j > 1 {
        for (i, v) in cols.row(j - 1) {
            if i > diff.len() {
                diff.resize(i, 0.0);
            }
            diff[i - 1] -= v;
            last = last.max(i);
        }
    }
    let weight_index = |i: usize| (i + 1) as u64;
    let mut suffix = 0.0;
    let mut value = 0.0;
    for i in (1..=last.max(j)).rev() {
        suffix += diff.get(i - 1).copied().unwrap_or(0.0);
        if i == j {
            value += suffix;
        } else if suffix != 0.0 {
            value += (w.ratio(weight_index(i), weight_index(j)) * suffix).abs();
        }
    }
    value
}
