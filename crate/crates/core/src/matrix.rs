//! Dense square complex matrices.
//!
//! This is the storage layer underneath unitaries, density operators and
//! observables. Everything in this crate is small (dimension 2^n for a
//! handful of spins), so a flat row-major `Vec<Complex64>` is all we need.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    elems: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            elems: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Build from nested rows; every row must have the same length as the
    /// number of rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elems[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.elems[row * self.dim + col] = value;
    }

    pub fn elems(&self) -> &[Complex64] {
        &self.elems
    }

    /// Column `col` written into a fresh vector.
    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn set_column(&mut self, col: usize, values: &[Complex64]) {
        debug_assert_eq!(values.len(), self.dim);
        for (r, v) in values.iter().enumerate() {
            self.set(r, col, *v);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.elems.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let d = self.dim;
        let mut out = vec![Complex64::ZERO; d];
        for i in 0..d {
            let mut acc = Complex64::ZERO;
            for j in 0..d {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            elems: self.elems.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            elems: self
                .elems
                .iter()
                .zip(&rhs.elems)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            elems: self
                .elems
                .iter()
                .zip(&rhs.elems)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; the left operand indexes the more significant
    /// block, consistent with spin 0 occupying the most significant bit of
    /// a basis index.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.dim, rhs.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for ia in 0..da {
            for ja in 0..da {
                let a = self.get(ia, ja);
                if a == Complex64::ZERO {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out.set(ia * db + ib, ja * db + jb, a * rhs.get(ib, jb));
                    }
                }
            }
        }
        out
    }

    /// Largest elementwise |a - b|.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.elems
            .iter()
            .zip(&rhs.elems)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise deviation of U U+ from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.mul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.0, -1.0)],
            vec![c(3.0, 0.0), c(0.5, 0.5)],
        ])
        .unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(m.mul(&id), m);
        assert_eq!(id.mul(&m), m);
    }

    #[test]
    fn kron_of_identities() {
        let id2 = ComplexMatrix::identity(2);
        assert_eq!(id2.kron(&id2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_block_placement() {
        // kron(diag(1, 2), X) puts the scaled block on each diagonal slot
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let x = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let k = d.kron(&x);
        assert_eq!(k.get(0, 1), c(1.0, 0.0));
        assert_eq!(k.get(1, 0), c(1.0, 0.0));
        assert_eq!(k.get(2, 3), c(2.0, 0.0));
        assert_eq!(k.get(3, 2), c(2.0, 0.0));
        assert_eq!(k.get(0, 2), c(0.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, -3.0)],
            vec![c(0.0, 4.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let a = m.adjoint();
        assert_eq!(a.get(0, 1), c(0.0, -4.0));
        assert_eq!(a.get(1, 0), c(2.0, 3.0));
    }

    #[test]
    fn trace_sums_diagonal() {
        let m = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)]);
        assert_eq!(m.trace(), c(0.0, 2.0));
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
