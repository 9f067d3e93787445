//! Band storage and an LU solve without pivoting.
//!
//! Elimination without row exchanges keeps the band intact. It is only used
//! on sub-blocks of generator transposes, which are column diagonally
//! dominant, so the pivots stay away from zero.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    /// Row-major, `lower + upper + 1` slots per row; slot `lower + (j - i)`
    /// holds entry `(i, j)`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![0.0; n * (lower + upper + 1)] }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.lower < i || j > i + self.upper {
            return None;
        }
        Some(i * (self.lower + self.upper + 1) + self.lower + j - i)
    }

    /// Entry `(i, j)`, 0-based; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Sets entry `(i, j)`, 0-based. Panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).unwrap_or_else(|| panic!("({i}, {j}) outside the band"));
        self.data[s] = v;
    }

    /// Solves `self · x = rhs`, overwriting `rhs` with `x` and `self` with
    /// its LU factors.
    pub fn solve_in_place(&mut self, rhs: &mut [f64]) -> Result<()> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::domain(format!("rhs has length {}, matrix has {n} rows", rhs.len())));
        }
        for k in 0..n {
            let pivot = self.get(k, k);
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::domain(format!("zero pivot at row {k}")));
            }
            let last_row = (k + self.lower).min(n - 1);
            let last_col = (k + self.upper).min(n - 1);
            for i in k + 1..=last_row {
                let factor = self.get(i, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.set(i, k, factor);
                for j in k + 1..=last_col {
                    let v = self.get(i, j) - factor * self.get(k, j);
                    self.set(i, j, v);
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + self.upper).min(n - 1);
            let s: f64 = (k + 1..=last_col).map(|j| self.get(k, j) * rhs[j]).sum();
            rhs[k] = (rhs[k] - s) / self.get(k, k);
        }
        Ok(())
    }
}
