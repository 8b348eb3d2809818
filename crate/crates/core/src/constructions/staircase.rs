//! Max-of-hyperplanes with a lower-triangular row pattern.
//!
//! Row `i ∈ 1..=T+1` of the `(T+1) × T` matrix has `a_j` below the
//! diagonal, `−d_i` on it (for `i ≤ T`) and zeros above. Every row value
//! `h_i·x` comes out of one prefix sum, so evaluating all `T+1` hyperplanes
//! costs `O(T)` and no row is ever materialized.

use crate::error::{LabError, Result};
use crate::vector::Vector;

/// Largest `T` for which [`Staircase::dense_rows`] builds the explicit matrix.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Staircase {
    below: Vec<f64>,
    diag: Vec<f64>,
}

/// Relative tie tolerance for the argmax.
fn tie_tolerance(max: f64) -> f64 {
    1e-12 * (1.0 + max.abs())
}

impl Staircase {
    pub(crate) fn new(below: Vec<f64>, diag: Vec<f64>) -> Self {
        debug_assert_eq!(below.len(), diag.len());
        Staircase { below, diag }
    }

    pub(crate) fn dim(&self) -> usize {
        self.below.len()
    }

    pub(crate) fn below(&self) -> &[f64] {
        &self.below
    }

    pub(crate) fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub(crate) fn row(&self, i: usize) -> Vector {
        let n = self.dim();
        assert!((1..=n + 1).contains(&i), "row index {i} outside 1..={}", n + 1);
        let mut h = Vector::zeros(n);
        let s = h.as_mut_slice();
        s[..i - 1].copy_from_slice(&self.below[..i - 1]);
        if i <= n {
            s[i - 1] = -self.diag[i - 1];
        }
        h
    }

    pub(crate) fn dense_rows(&self) -> Result<Vec<Vector>> {
        if self.dim() > DENSE_LIMIT {
            return Err(LabError::invalid(
                "T",
                format!("dense rows are only built for T ≤ {DENSE_LIMIT}"),
            ));
        }
        Ok((1..=self.dim() + 1).map(|i| self.row(i)).collect())
    }

    /// Calls `visit(i, h_i·x)` for `i = 1..=T+1` in order.
    fn for_each_linear(&self, x: &Vector, mut visit: impl FnMut(usize, f64)) {
        assert_eq!(x.dim(), self.dim(), "query point has the wrong dimension");
        let xs = x.as_slice();
        let mut prefix = 0.0;
        for j in 0..self.dim() {
            visit(j + 1, prefix - self.diag[j] * xs[j]);
            prefix += self.below[j] * xs[j];
        }
        visit(self.dim() + 1, prefix);
    }

    fn max_linear(&self, x: &Vector) -> f64 {
        let mut best = f64::NEG_INFINITY;
        self.for_each_linear(x, |_, v| best = best.max(v));
        best
    }

    /// `(max_i h_i·x + offset, smallest near-maximizing i)`.
    pub(crate) fn eval(&self, x: &Vector, offset: f64) -> (f64, usize) {
        let max = self.max_linear(x);
        let floor = max - tie_tolerance(max + offset);
        let mut active = 0;
        self.for_each_linear(x, |i, v| {
            if active == 0 && v >= floor {
                active = i;
            }
        });
        (max + offset, active)
    }

    /// Every index within the tie tolerance of the maximum.
    pub(crate) fn active_set(&self, x: &Vector, offset: f64) -> Vec<usize> {
        let max = self.max_linear(x);
        let floor = max - tie_tolerance(max + offset);
        let mut set = Vec::new();
        self.for_each_linear(x, |i, v| {
            if v >= floor {
                set.push(i);
            }
        });
        set
    }

    /// `max_i ‖h_i‖²`.
    pub(crate) fn max_row_norm_sq(&self) -> f64 {
        let mut below_sq = 0.0;
        let mut best: f64 = 0.0;
        for j in 0..self.dim() {
            best = best.max(below_sq + self.diag[j] * self.diag[j]);
            below_sq += self.below[j] * self.below[j];
        }
        best.max(below_sq)
    }
}
