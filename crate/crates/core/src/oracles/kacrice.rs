//! The Kac–Rice route: correlation functions from the joint covariance of the
//! random series and its derivative at the evaluation points.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::ddouble::Dd;
use super::{check_in_disk, one_minus, OracleContext};
use crate::error::{Error, Result};
use crate::linalg::{determinant, inverse, CMatrix};
use crate::mu::Mu;

/// `M = [[A, B], [B^dagger, C]]` in the limit of infinite degree, with
/// `x = z_i conj(z_j)`:
/// `A = x/(1-x)`, `B = z_i/(1-x)^2`, `C = (1+x)/(1-x)^3`,
/// and the blocks `N1, N2, N3` of `M^{-1}`.
#[derive(Debug, Clone)]
pub struct CovarianceBlocks {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub n1: CMatrix,
    pub n2: CMatrix,
    pub n3: CMatrix,
}

impl CovarianceBlocks {
    pub fn limit(points: &[Complex64]) -> Result<Self> {
        let k = points.len();
        if k == 0 {
            return Err(Error::invalid("points", "need at least one point"));
        }
        for &z in points {
            check_in_disk(z)?;
        }
        let mut d = vec![Complex64::new(0.0, 0.0); k * k];
        for i in 0..k {
            for j in 0..k {
                d[i * k + j] = one_minus(points[i], points[j])?;
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let a = CMatrix::from_fn(k, |i, j| (one - d[i * k + j]) / d[i * k + j]);
        let b = CMatrix::from_fn(k, |i, j| points[i] / (d[i * k + j] * d[i * k + j]));
        let c = CMatrix::from_fn(k, |i, j| {
            let dij = d[i * k + j];
            (one + one - dij) / (dij * dij * dij)
        });
        let m = CMatrix::from_fn(2 * k, |i, j| match (i < k, j < k) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - k)],
            (false, true) => b[(j, i - k)].conj(),
            (false, false) => c[(i - k, j - k)],
        });
        let inv = inverse(&m)?;
        let block = |r: usize, s: usize| CMatrix::from_fn(k, |i, j| inv[(r + i, s + j)]);
        Ok(Self {
            n1: block(0, 0),
            n2: block(0, k),
            n3: block(k, k),
            a,
            b,
            c,
        })
    }

    pub fn k(&self) -> usize {
        self.a.n()
    }

    /// Relative defect of `det M det N3 = det A`.
    pub fn determinant_identity_defect(&self) -> f64 {
        let k = self.k();
        let m = CMatrix::from_fn(2 * k, |i, j| match (i < k, j < k) {
            (true, true) => self.a[(i, j)],
            (true, false) => self.b[(i, j - k)],
            (false, true) => self.b[(j, i - k)].conj(),
            (false, false) => self.c[(i - k, j - k)],
        });
        let lhs = determinant(&m) * determinant(&self.n3);
        let rhs = determinant(&self.a);
        (lhs - rhs).norm() / rhs.norm()
    }

    /// `1^T N2` as a row vector.
    fn ones_n2(&self) -> Vec<Complex64> {
        let k = self.k();
        (0..k)
            .map(|j| (0..k).map(|i| self.n2[(i, j)]).sum())
            .collect()
    }

    fn ones_n1_ones(&self) -> f64 {
        self.n1.as_slice().iter().sum::<Complex64>().re
    }
}

/// One-point function by Kac–Rice with scalar blocks and the explicit
/// two-by-two inverse `N1 = C/D, N2 = -B/D, N3 = A/D`, `D = AC - |B|^2`.
/// Carried out in double-double: the exponent `-c (N1 - |N2|^2/N3)` cancels
/// severely for small `|z|`.
pub fn rho1_kacrice(z: Complex64, ctx: &OracleContext) -> Result<f64> {
    check_in_disk(z)?;
    one_minus(z, z)?;
    if z.norm_sqr() == 0.0 {
        return Ok(if ctx.c == 0.0 { 1.0 / PI } else { 0.0 });
    }
    let one = Dd::new(1.0);
    let x = Dd::new(z.norm_sqr());
    let d = one - x;
    let a = x / d;
    let d2 = d * d;
    let c_blk = (one + x) / (d2 * d);
    let b2 = x / (d2 * d2);
    let det = a * c_blk - b2;
    let n1 = c_blk / det;
    let n2_sq = b2 / (det * det);
    let n3 = a / det;
    let c = Dd::new(ctx.c);
    let g = c * n2_sq / n3;
    let exponent = (g - c * n1).to_f64();
    let rest = ((one + g) / (a * n3)).to_f64() / PI;
    Ok((exponent + rest.ln()).exp())
}

/// Two-point function by Kac–Rice, with `M` inverted numerically.
pub fn rho2_kacrice(z: Complex64, w: Complex64, ctx: &OracleContext) -> Result<f64> {
    if z.norm_sqr() == 0.0 || w.norm_sqr() == 0.0 {
        return Err(Error::invalid(
            "points",
            "the Kac-Rice route needs nonzero points",
        ));
    }
    let blk = CovarianceBlocks::limit(&[z, w])?;
    let h = inverse(&blk.n3)?;
    let v = blk.ones_n2();
    let c = ctx.c;
    // G = (i / conj(mu)) (1^T N2) N3^{-1}; zero when mu is infinite
    let pref = match ctx.mu {
        Mu::Infinite => Complex64::new(0.0, 0.0),
        Mu::Finite(m) => Complex64::new(0.0, 1.0) / m.conj(),
    };
    let g: Vec<Complex64> = (0..2)
        .map(|j| pref * (v[0] * h[(0, j)] + v[1] * h[(1, j)]))
        .collect();
    let quad: Complex64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| v[i] * h[(i, j)] * v[j].conj())
        .sum();
    let exponent = -c * blk.ones_n1_ones() + c * quad.re;
    let (g1, g2) = (g[0], g[1]);
    let (h11, h12, h22) = (h[(0, 0)], h[(0, 1)], h[(1, 1)]);
    let bracket = (g1.norm_sqr() + h11) * (g2.norm_sqr() + h22)
        + (g1 * g2.conj() + h12.conj()) * (g1.conj() * g2 + h12)
        - (g1 * g2).norm_sqr();
    let det_a = determinant(&blk.a);
    let rest = (bracket / det_a).re / (PI * PI);
    Ok(if rest > 0.0 {
        (exponent + rest.ln()).exp()
    } else {
        exponent.exp() * rest
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::density_limit;

    #[test]
    fn scalar_schur_identity() {
        let blk = CovarianceBlocks::limit(&[Complex64::new(0.5, 0.0)]).unwrap();
        let s = blk.a[(0, 0)] * blk.c[(0, 0)] - blk.b[(0, 0)].norm_sqr();
        assert!((s.re - 0.0625 / 0.316_406_25).abs() < 1e-14);
        assert!(blk.determinant_identity_defect() < 1e-12);
    }

    #[test]
    fn two_point_determinant_identity() {
        let blk = CovarianceBlocks::limit(&[Complex64::new(0.3, 0.2), Complex64::new(-0.4, 0.5)])
            .unwrap();
        assert!(blk.determinant_identity_defect() < 1e-11);
    }

    #[test]
    fn one_point_matches_closed_form() {
        let ctx = OracleContext::new(Mu::real(1.0)).unwrap();
        let z = Complex64::new(0.5, 0.0);
        let kr = rho1_kacrice(z, &ctx).unwrap();
        let lim = density_limit(z, &ctx).unwrap().value;
        assert!((kr - lim).abs() < 1e-13 * lim);
        let inf = OracleContext::infinite();
        let kr = rho1_kacrice(z, &inf).unwrap();
        assert!((kr - 1.0 / (PI * 0.5625)).abs() < 1e-13);
    }
}
