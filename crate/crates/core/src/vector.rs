//! Dense real vectors.
//!
//! Storage is inline for one and two coordinates so the 1-D Monte Carlo
//! workloads never touch the allocator; larger vectors spill to the heap.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use smallvec::SmallVec;

use crate::error::{LabError, Result};

#[derive(Clone, PartialEq, Default)]
pub struct Vector(SmallVec<[f64; 2]>);

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        Vector(SmallVec::from_elem(0.0, dim))
    }

    pub fn from_vec(coords: Vec<f64>) -> Self {
        Vector(SmallVec::from_vec(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Vector(SmallVec::from_slice(coords))
    }

    /// The standard basis vector `e_i` with a 1-based index.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim, "basis index {i} outside 1..={dim}");
        let mut v = Self::zeros(dim);
        v.0[i - 1] = 1.0;
        v
    }

    pub fn scalar(value: f64) -> Self {
        Self::from_slice(&[value])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.to_vec()
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(LabError::DimensionMismatch {
                expected,
                got: self.dim(),
            })
        }
    }

    #[inline]
    fn same_dim(&self, other: &Vector) {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.same_dim(other);
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Vector) -> f64 {
        self.same_dim(other);
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist_inf(&self, other: &Vector) -> f64 {
        self.same_dim(other);
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Vector) {
        self.same_dim(x);
        for (s, v) in self.0.iter_mut().zip(x.0.iter()) {
            *s += a * v;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in self.0.iter_mut() {
            *s *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Vector {
        let mut v = self.clone();
        v.scale(a);
        v
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    /// Weighted combination `sum_i w_i v_i`. Empty input yields `None`.
    pub fn combination<'a, I>(items: I) -> Option<Vector>
    where
        I: IntoIterator<Item = (f64, &'a Vector)>,
    {
        let mut iter = items.into_iter();
        let (w0, v0) = iter.next()?;
        let mut acc = v0.scaled(w0);
        for (w, v) in iter {
            acc.axpy(w, v);
        }
        Some(acc)
    }

    /// Unweighted mean of a non-empty collection.
    pub fn mean<'a, I>(items: I) -> Option<Vector>
    where
        I: IntoIterator<Item = &'a Vector>,
    {
        let mut count = 0usize;
        let mut acc: Option<Vector> = None;
        for v in items {
            count += 1;
            match acc.as_mut() {
                Some(a) => a.axpy(1.0, v),
                None => acc = Some(v.clone()),
            }
        }
        acc.map(|mut a| {
            a.scale(1.0 / count as f64);
            a
        })
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector::from_vec(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector::from_slice(v)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        let mut v = self.clone();
        v.axpy(1.0, rhs);
        v
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        let mut v = self.clone();
        v.axpy(-1.0, rhs);
        v
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scaled(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_arithmetic() {
        let a = Vector::from_slice(&[3.0, 4.0]);
        let b = Vector::from_slice(&[1.0, -1.0]);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), -1.0);
        assert_eq!((&a - &b).as_slice(), &[2.0, 5.0]);
        assert_eq!((&a + &b).as_slice(), &[4.0, 3.0]);
        assert_eq!((2.0 * &b).as_slice(), &[2.0, -2.0]);
        assert_eq!(a.dist_inf(&b), 5.0);
    }

    #[test]
    fn mean_and_combination() {
        let vs = [Vector::scalar(0.0), Vector::scalar(2.0)];
        assert_eq!(Vector::mean(vs.iter()).unwrap().as_slice(), &[1.0]);
        let c = Vector::combination([(0.25, &vs[0]), (0.75, &vs[1])]).unwrap();
        assert_eq!(c.as_slice(), &[1.5]);
        assert!(Vector::mean(std::iter::empty()).is_none());
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mismatched_dot_panics() {
        Vector::zeros(2).dot(&Vector::zeros(3));
    }

    #[test]
    fn spills_to_heap_transparently() {
        let v = Vector::from_vec((0..100).map(f64::from).collect());
        assert_eq!(v.dim(), 100);
        assert_eq!(v[99], 99.0);
    }
}
