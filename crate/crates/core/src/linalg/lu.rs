use num_complex::Complex64;

use super::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factors `a`; an exactly zero pivot is reported as [`Error::Singular`].
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.n();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { index: k });
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot_inv = ONE / lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] * pivot_inv;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                let (upper, lower) = lu.as_mut_slice().split_at_mut(i * n);
                let src = &upper[k * n + k + 1..k * n + n];
                for (x, &s) in lower[k + 1..n].iter_mut().zip(src) {
                    *x -= f * s;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.n();
        (0..n).map(|i| self.lu[(i, i)]).product::<Complex64>() * self.sign
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.lu.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: Complex64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Determinant via LU; a singular matrix has determinant zero.
pub fn determinant(a: &CMatrix) -> Complex64 {
    match Lu::new(a) {
        Ok(lu) => lu.determinant(),
        Err(_) => ZERO,
    }
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.n();
    let lu = Lu::new(a)?;
    let mut inv = CMatrix::zeros(n);
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = ZERO);
        e[j] = ONE;
        let col = lu.solve(&e)?;
        for (i, v) in col.into_iter().enumerate() {
            inv[(i, j)] = v;
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_permutation() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(determinant(&m), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn solve_and_inverse() {
        let m = CMatrix::from_rows(vec![
            vec![Complex64::new(2.0, 1.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)],
        ])
        .unwrap();
        let inv = inverse(&m).unwrap();
        let id = m.matmul(&inv).unwrap();
        assert!(id.sub(&CMatrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn singular_is_an_error() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(Lu::new(&m), Err(Error::Singular { index: 1 })));
        assert_eq!(determinant(&m), ZERO);
    }
}
