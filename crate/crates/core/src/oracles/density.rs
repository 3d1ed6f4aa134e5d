use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_in_disk, damped, one_minus, OracleContext};
use crate::error::{Error, Result};

/// Why a density value is what it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Inside,
    /// Outside the support; the value is exactly zero.
    Outside,
    /// At `z = 0` for finite `mu`: zero as the limit of an essential singularity.
    ZeroByLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub value: f64,
    pub support: Support,
}

impl Density {
    fn inside(value: f64) -> Self {
        Self {
            value,
            support: Support::Inside,
        }
    }
}

/// `K(w, z) = 1/(pi (1 - w conj(z))^2)`.
pub fn kernel_k(w: Complex64, z: Complex64) -> Result<Complex64> {
    if (w * z.conj()).norm() >= 1.0 {
        return Err(Error::invalid("points", "need |w conj(z)| < 1"));
    }
    let d = one_minus(w, z)?;
    Ok((d * d * PI).inv())
}

/// Eigenvalue density of `UA` with `A = diag(a, 1, ..., 1)` at size `N`.
///
/// Supported on `|a| <= |z| <= 1`; outside it the value is zero and flagged.
/// At `a = 0` this is the one-row-and-column truncation of a Haar unitary;
/// the remaining eigenvalue sits at the origin and is not part of the value.
pub fn density_finite_n(z: Complex64, a: Complex64, n: usize) -> Result<Density> {
    if n < 2 {
        return Err(Error::invalid("n", "must be at least 2"));
    }
    let alpha = a.norm_sqr();
    if alpha >= 1.0 {
        return Err(Error::invalid("a", "need |a| < 1"));
    }
    let x = z.norm_sqr();
    if !x.is_finite() {
        return Err(Error::OutsideDisk {
            point: crate::mu::format_complex(z),
        });
    }
    if x > 1.0 || x < alpha {
        return Ok(Density {
            value: 0.0,
            support: Support::Outside,
        });
    }
    let nf = n as f64;
    if alpha == 0.0 {
        // sum_{m=1}^{N-1} m x^{m-1}
        let s = (1..n).rev().fold(0.0, |acc, m| acc * x + m as f64);
        return Ok(Density::inside(s / PI));
    }
    // (N-1)(x^N + alpha) + sum_{j=1}^{N-1} ((j-1) + (N-1-j) alpha) x^j
    let inner = (1..n).rev().fold(0.0, |acc, j| {
        acc * x + ((j - 1) as f64 + (nf - 1.0 - j as f64) * alpha)
    }) * x;
    let bracket = (nf - 1.0) * (x.powi(n as i32) + alpha) + inner;
    let value = (1.0 - alpha / x).powi(n as i32 - 2) / ((1.0 - alpha).powi(n as i32 - 1) * x * x)
        * bracket
        / PI;
    Ok(Density::inside(value))
}

/// Limiting density `exp(c(1 - 1/x)) (1 + c(1-x)/x^2) / (pi (1-x)^2)`, `x = |z|^2`.
pub fn density_limit(z: Complex64, ctx: &OracleContext) -> Result<Density> {
    check_in_disk(z)?;
    one_minus(z, z)?;
    let x = z.norm_sqr();
    let c = ctx.c;
    if x == 0.0 {
        return Ok(if c == 0.0 {
            Density::inside(1.0 / PI)
        } else {
            Density {
                value: 0.0,
                support: Support::ZeroByLimit,
            }
        });
    }
    let value = damped(
        c,
        x,
        (1.0 + c * (1.0 - x) / (x * x)) / (PI * (1.0 - x).powi(2)),
    );
    Ok(Density::inside(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu::Mu;
    use gauss_quad::GaussLegendre;

    fn cr(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn kernel_values() {
        assert!((kernel_k(cr(0.0), cr(0.0)).unwrap().re - 1.0 / PI).abs() < 1e-15);
        assert!((kernel_k(cr(0.5), cr(0.5)).unwrap().re - 0.565_884_242_104_07).abs() < 1e-12);
        let (w, z) = (Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.6));
        let d = kernel_k(w, z).unwrap() - kernel_k(z, w).unwrap().conj();
        assert!(d.norm() < 1e-15);
        assert!(kernel_k(cr(1.0), cr(1.0)).is_err());
    }

    #[test]
    fn finite_n_two_by_two() {
        let d = density_finite_n(cr(1.0), cr(0.5), 2).unwrap();
        assert!((d.value - 1.25 / 0.75 / PI).abs() < 1e-14);
        assert_eq!(
            density_finite_n(cr(0.4), cr(0.5), 2).unwrap().support,
            Support::Outside
        );
    }

    #[test]
    fn finite_n_normalisation() {
        let gl = GaussLegendre::new(40.try_into().unwrap());
        for (a, n) in [(0.5, 2usize), (0.3, 7), (0.0, 5), (0.8, 30)] {
            let total = gl.integrate(a, 1.0, |r| {
                2.0 * PI * r * density_finite_n(cr(r), cr(a), n).unwrap().value
            });
            // at a = 0 one eigenvalue sits exactly at the origin
            let want = if a == 0.0 { n - 1 } else { n } as f64;
            assert!((total - want).abs() < 1e-10, "a={a} n={n} total={total}");
        }
    }

    #[test]
    fn finite_n_truncated_unitary_case() {
        for n in [2usize, 5, 20] {
            for r in [0.0, 0.3, 0.9] {
                let x: f64 = r * r;
                let want = if x == 0.0 {
                    1.0
                } else {
                    (n as f64 * x.powi(n as i32 - 1) * (x - 1.0) - (x.powi(n as i32) - 1.0))
                        / (x - 1.0).powi(2)
                } / PI;
                let got = density_finite_n(cr(r), cr(0.0), n).unwrap().value;
                assert!((got - want).abs() < 1e-12 * want.max(1.0), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn limit_values() {
        let inf = OracleContext::infinite();
        assert!((density_limit(cr(0.0), &inf).unwrap().value - 1.0 / PI).abs() < 1e-16);
        let v = density_limit(cr(0.5), &inf).unwrap().value;
        assert!((v - 1.0 / (PI * 0.5625)).abs() < 1e-15);
        let one = OracleContext::new(Mu::real(1.0)).unwrap();
        let v = density_limit(cr(0.5), &one).unwrap().value;
        assert!((v - 0.366_258_326_849_4).abs() < 1e-12, "{v}");
        let d = density_limit(cr(0.0), &one).unwrap();
        assert_eq!((d.value, d.support), (0.0, Support::ZeroByLimit));
        assert!(density_limit(cr(1e-3), &one).unwrap().value < 1e-300);
        assert!(density_limit(cr(1e-200), &one).unwrap().value == 0.0);
        assert!(density_limit(cr(1.0), &one).is_err());
    }
}
