//! Dense complex linear algebra: the matrix carrier, Householder QR with the
//! phase normalisation needed for Haar sampling, LU solves, and a
//! Hessenberg + shifted-QR eigenvalue solver.

mod eigen;
mod hessenberg;
mod lu;
mod qr;

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{eigenvalues, eigenvalues_default, EigenOptions};
pub use hessenberg::reduce_to_hessenberg;
pub use lu::{determinant, inverse, Lu};
pub use qr::{qr_phase_normalized, HouseholderQr};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    /// Builds from a row-major buffer of length `n * n`.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    /// Real-valued convenience constructor, mostly for tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `max |(Q^† Q - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        // columns i and j inner products
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for k in 0..n {
                    s += self[(k, i)].conj() * self[(k, j)];
                }
                if i == j {
                    s -= ONE;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    fn check_same(&self, rhs: &Self) -> Result<()> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Anything that can act on a vector: dense matrices and implicitly stored
/// Householder products both qualify.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
}

impl LinearOperator for CMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.mul_vec(x).expect("operator dimension")
    }
}

/// `‖x‖_2`
pub(crate) fn norm2(x: &[Complex64]) -> f64 {
    // scaled accumulation; entries here are O(1) so plain summation is enough
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary() {
        assert_eq!(CMatrix::identity(5).unitarity_defect(), 0.0);
    }

    #[test]
    fn matmul_small() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(
            c,
            CMatrix::from_real_rows(&[&[2.0, 1.0], &[4.0, 3.0]]).unwrap()
        );
        assert_eq!(a.trace(), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![ONE, ONE], vec![ONE]];
        assert!(matches!(
            CMatrix::from_rows(rows),
            Err(Error::NotSquare { .. })
        ));
    }
}
