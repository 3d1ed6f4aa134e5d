use std::f64::consts::{PI, TAU};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mu::format_complex;

/// Ordered-pair count estimate of the two-point function at `(z, w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWindowEstimate {
    pub z: Complex64,
    pub w: Complex64,
    pub eps: f64,
    /// Rotated copies of the window pair averaged per sample.
    pub rotations: usize,
    pub samples: usize,
    /// Total `n_z n_w` over samples and rotations.
    pub pair_counts: u64,
    pub estimate: f64,
    pub stderr: f64,
}

fn check_windows(z: Complex64, w: Complex64, eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps", "must be positive"));
    }
    for p in [z, w] {
        if p.norm() + eps >= 1.0 {
            return Err(Error::OutsideDisk {
                point: format!("{} (window radius {eps})", format_complex(p)),
            });
        }
    }
    if (z - w).norm() <= 2.0 * eps {
        return Err(Error::invalid(
            "eps",
            "windows overlap: need |z - w| > 2 eps",
        ));
    }
    Ok(())
}

/// `E[n_z n_w] / (pi eps^2)^2` with disk windows of radius `eps`. For a
/// rotation-invariant process the window pair may be turned by `2 pi j / R`,
/// `j < R`, and the counts averaged per sample.
pub fn estimate_rho2_at<S: AsRef<[Complex64]>>(
    spectra: &[S],
    z: Complex64,
    w: Complex64,
    eps: f64,
    rotations: usize,
) -> Result<PairWindowEstimate> {
    check_windows(z, w, eps)?;
    if rotations == 0 {
        return Err(Error::invalid("rotations", "must be at least 1"));
    }
    if spectra.is_empty() {
        return Err(Error::invalid("spectra", "need at least one sample"));
    }
    let turns: Vec<Complex64> = (0..rotations)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / rotations as f64))
        .collect();
    let eps2 = eps * eps;
    let norm = (PI * eps2).powi(2);
    let mut total = 0u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for s in spectra {
        let pts = s.as_ref();
        let mut per = 0u64;
        for t in &turns {
            let (zt, wt) = (z * t, w * t);
            let nz = pts.iter().filter(|p| (*p - zt).norm_sqr() < eps2).count() as u64;
            let nw = pts.iter().filter(|p| (*p - wt).norm_sqr() < eps2).count() as u64;
            per += nz * nw;
        }
        total += per;
        let v = per as f64 / (rotations as f64 * norm);
        sum += v;
        sum_sq += v * v;
    }
    let n = spectra.len() as f64;
    let mean = sum / n;
    let var = if spectra.len() > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(PairWindowEstimate {
        z,
        w,
        eps,
        rotations,
        samples: spectra.len(),
        pair_counts: total,
        estimate: mean,
        stderr: (var / n).sqrt(),
    })
}

/// Polar Gauss–Legendre rule on the unit disk (area-normalised weights).
fn disk_rule(radial: usize, angular: usize) -> Vec<(Complex64, f64)> {
    let gl = GaussLegendre::new(radial.try_into().expect("nonzero"));
    let mut out = Vec::with_capacity(radial * angular);
    for (x, wr) in gl.nodes().zip(gl.weights()) {
        let r = 0.5 * (x + 1.0);
        for j in 0..angular {
            let t = TAU * (j as f64 + 0.5) / angular as f64;
            // 0.5 dr * r dr * dtheta / pi
            out.push((
                Complex64::from_polar(r, t),
                0.5 * wr * r * TAU / angular as f64 / PI,
            ));
        }
    }
    out
}

/// Average of `rho2` over the two windows, the quantity the pair estimator
/// targets.
pub fn window_average<F>(z: Complex64, w: Complex64, eps: f64, rho2: F) -> Result<f64>
where
    F: Fn(Complex64, Complex64) -> Result<f64>,
{
    check_windows(z, w, eps)?;
    let rule = disk_rule(8, 12);
    let mut total = 0.0;
    for (p, wp) in &rule {
        for (q, wq) in &rule {
            total += wp * wq * rho2(z + eps * p, w + eps * q)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_rule_integrates_polynomials() {
        let rule = disk_rule(8, 12);
        let one: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((one - 1.0).abs() < 1e-14);
        // mean of |p|^2 over the unit disk is 1/2
        let m2: f64 = rule.iter().map(|(p, w)| w * p.norm_sqr()).sum();
        assert!((m2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn overlapping_windows_rejected() {
        let pts = vec![vec![Complex64::new(0.1, 0.0)]];
        let z = Complex64::new(0.3, 0.0);
        assert!(estimate_rho2_at(&pts, z, z + 0.03, 0.02, 1).is_err());
        assert!(estimate_rho2_at(&pts, z, -z, 0.0, 1).is_err());
        assert!(estimate_rho2_at(&pts, Complex64::new(0.99, 0.0), -z, 0.02, 1).is_err());
        assert!(estimate_rho2_at(&pts, z, -z, 0.02, 1).is_ok());
    }

    #[test]
    fn counts_ordered_pairs() {
        let z = Complex64::new(0.3, 0.0);
        let pts = vec![vec![z, z + 0.001, -z, Complex64::new(0.0, 0.5)]];
        let e = estimate_rho2_at(&pts, z, -z, 0.01, 1).unwrap();
        assert_eq!(e.pair_counts, 2);
        assert!((e.estimate - 2.0 / (PI * 1e-4).powi(2)).abs() < 1e-6 * e.estimate);
    }
}
