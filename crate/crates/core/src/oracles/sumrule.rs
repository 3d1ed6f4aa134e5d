use std::f64::consts::{PI, TAU};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{truncated_correlation, OracleContext};
use crate::error::{Error, Result};

/// Polar product rule on `|z| < 1 - delta`: Gauss–Legendre in `r`,
/// trapezoid in the angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub delta: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            radial_nodes: 96,
            angular_nodes: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleReport {
    pub k: usize,
    pub points: Vec<Complex64>,
    pub quadrature: QuadratureSpec,
    /// `int rho^T_{k+1}(points, z) d^2 z`
    pub integral: f64,
    /// `k rho^T_k(points)`
    pub k_rho_t: f64,
    /// `integral + k_rho_t`
    pub defect: f64,
    /// Same defect with both node counts doubled.
    pub refined_defect: f64,
    pub converged: bool,
}

fn integrate(points: &[Complex64], ctx: &OracleContext, q: &QuadratureSpec) -> Result<f64> {
    let radial = GaussLegendre::new(
        q.radial_nodes
            .try_into()
            .map_err(|_| Error::invalid("radial_nodes", "must be positive"))?,
    );
    let m = q.angular_nodes;
    let mut failure = None;
    let mut args = points.to_vec();
    args.push(Complex64::new(0.0, 0.0));
    let value = radial.integrate(0.0, 1.0 - q.delta, |r| {
        let mut ring = 0.0;
        for j in 0..m {
            *args.last_mut().unwrap() = Complex64::from_polar(r, TAU * j as f64 / m as f64);
            match truncated_correlation(&args, ctx) {
                Ok(v) => ring += v,
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        ring * TAU / m as f64 * r
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `int rho^T_{k+1}(z_1..z_k, z) d^2 z + k rho^T_k(z_1..z_k)` over the disk
/// of radius `1 - delta`. Vanishes as `delta -> 0` when the correlations are
/// determinantal with a reproducing kernel; reported, not asserted, otherwise.
pub fn sum_rule_defect(
    points: &[Complex64],
    ctx: &OracleContext,
    quadrature: QuadratureSpec,
) -> Result<SumRuleReport> {
    let k = points.len();
    if !(1..=2).contains(&k) {
        return Err(Error::invalid("k", "sum rule is implemented for k = 1, 2"));
    }
    if !(quadrature.delta > 0.0 && quadrature.delta < 1.0) {
        return Err(Error::invalid("delta", "need 0 < delta < 1"));
    }
    if quadrature.angular_nodes == 0 {
        return Err(Error::invalid("angular_nodes", "must be positive"));
    }
    let k_rho_t = k as f64 * truncated_correlation(points, ctx)?;
    let integral = integrate(points, ctx, &quadrature)?;
    let fine = QuadratureSpec {
        radial_nodes: 2 * quadrature.radial_nodes,
        angular_nodes: 2 * quadrature.angular_nodes,
        ..quadrature
    };
    let refined = integrate(points, ctx, &fine)?;
    let defect = integral + k_rho_t;
    let refined_defect = refined + k_rho_t;
    let scale = integral.abs().max(k_rho_t.abs()).max(1.0 / PI);
    Ok(SumRuleReport {
        k,
        points: points.to_vec(),
        quadrature,
        integral,
        k_rho_t,
        defect,
        refined_defect,
        converged: (refined - integral).abs() <= 1e-6 * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu::Mu;

    #[test]
    fn reproducing_case_small_defect() {
        let inf = OracleContext::infinite();
        let q = QuadratureSpec {
            radial_nodes: 48,
            angular_nodes: 64,
            ..Default::default()
        };
        let z = Complex64::new(0.3, 0.2);
        let rep = sum_rule_defect(&[z], &inf, q).unwrap();
        assert!(rep.converged);
        assert!(rep.defect.abs() < 0.02, "{rep:?}");
        let rot = sum_rule_defect(&[z * Complex64::from_polar(1.0, 1.1)], &inf, q).unwrap();
        assert!((rot.defect - rep.defect).abs() < 1e-10);
    }

    #[test]
    fn finite_mu_is_reported() {
        let ctx = OracleContext::new(Mu::real(1.0)).unwrap();
        let q = QuadratureSpec {
            radial_nodes: 24,
            angular_nodes: 32,
            ..Default::default()
        };
        let rep = sum_rule_defect(&[Complex64::new(0.5, 0.0)], &ctx, q).unwrap();
        assert!(rep.defect.is_finite());
        assert!(sum_rule_defect(&[], &ctx, q).is_err());
    }
}
