use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rho2_parts;
use crate::error::Result;
use crate::rng::RngStream;

/// Test points are drawn uniformly from the disk of this radius.
pub const IDENTITY_RADIUS: f64 = 0.95;

/// Largest relative residuals over the sampled pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub borchardt: f64,
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.borchardt.max(self.y0).max(self.y1).max(self.y2)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Borchardt's determinant-permanent identity at `N = 2`.
fn borchardt_residual(x: [Complex64; 2], y: [Complex64; 2]) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let d = |j: usize, k: usize| one - x[j] * y[k];
    let lhs = (d(0, 0) * d(0, 0) * d(1, 1) * d(1, 1)).inv()
        - (d(0, 1) * d(0, 1) * d(1, 0) * d(1, 0)).inv();
    let perm = (d(0, 0) * d(1, 1)).inv() + (d(0, 1) * d(1, 0)).inv();
    let rhs = (x[1] - x[0]) * (y[1] - y[0]) / (d(0, 0) * d(0, 1) * d(1, 0) * d(1, 1)) * perm;
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm())
}

/// Checks the two-point parts against the factorised forms that contain
/// `|z - w|^2` explicitly, plus Borchardt at `(z, conj z, w, conj w)`.
pub fn identity_suite(sample_count: usize, rng: &mut RngStream) -> Result<IdentityReport> {
    let mut rep = IdentityReport {
        samples: sample_count,
        borchardt: 0.0,
        y0: 0.0,
        y1: 0.0,
        y2: 0.0,
    };
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..sample_count {
        let z = rng.uniform_in_disk(IDENTITY_RADIUS);
        let w = rng.uniform_in_disk(IDENTITY_RADIUS);
        let parts = rho2_parts(z, w)?;
        let (a, b) = (z.norm_sqr(), w.norm_sqr());
        let x = a * b;
        let cross = (one - w * z.conj()).norm_sqr();
        let y2 = (z - w).norm_sqr() / ((1.0 - a) * (1.0 - b) * cross);
        let y0 = y2 * x * (1.0 / ((1.0 - a) * (1.0 - b)) + 1.0 / cross);
        let mixed = (w * z.conj() * (one - z * w.conj())).inv();
        let t1 = 1.0 / ((1.0 - b) * a) + 1.0 / ((1.0 - a) * b) + 2.0 * mixed.re;
        let y1_minus_y2 = y2 * x * t1;

        rep.borchardt = rep
            .borchardt
            .max(borchardt_residual([z, w], [z.conj(), w.conj()]));
        rep.y0 = rep.y0.max(rel(parts.y0, y0));
        rep.y1 = rep.y1.max(rel(parts.y1 - parts.y2, y1_minus_y2));
        rep.y2 = rep.y2.max(rel(parts.y2, y2));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        let mut rng = RngStream::new(7, 0);
        let rep = identity_suite(1000, &mut rng).unwrap();
        assert!(rep.borchardt < 1e-11, "{rep:?}");
        assert!(rep.y0 < 1e-11, "{rep:?}");
        assert!(rep.y1 < 1e-11, "{rep:?}");
        assert_eq!(rep.y2, 0.0);
    }
}
