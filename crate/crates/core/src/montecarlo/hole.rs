use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Empirical survival of the smallest modulus at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleEstimate {
    pub r: f64,
    pub fraction: f64,
    /// Wilson score interval at the requested confidence.
    pub lo: f64,
    pub hi: f64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub stderr: f64,
    pub survivors: usize,
    pub samples: usize,
}

/// Two-sided normal quantile for a confidence level in `(0, 1)`.
pub fn normal_quantile(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid("confidence", "must lie in (0, 1)"));
    }
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(n.inverse_cdf(0.5 + 0.5 * confidence))
}

pub fn wilson_interval(successes: usize, n: usize, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let z = normal_quantile(confidence)?;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // the interval always contains p; keep it so under rounding
    Ok(((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0)))
}

/// Fraction of samples whose smallest modulus is at least `r`, for each `r`.
/// An empty sample counts as surviving every radius.
pub fn estimate_hole_probability<S: AsRef<[Complex64]>>(
    spectra: &[S],
    r_grid: &[f64],
    confidence: f64,
) -> Result<Vec<HoleEstimate>> {
    if spectra.is_empty() {
        return Err(Error::invalid("spectra", "need at least one sample"));
    }
    if let Some(r) = r_grid.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
        return Err(Error::invalid("r", format!("{r} is outside [0, 1)")));
    }
    normal_quantile(confidence)?;
    let mut minima: Vec<f64> = spectra
        .iter()
        .map(|s| {
            s.as_ref()
                .iter()
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    minima.sort_by(f64::total_cmp);
    let n = minima.len();
    r_grid
        .iter()
        .map(|&r| {
            let survivors = n - minima.partition_point(|&m| m < r);
            let (lo, hi) = wilson_interval(survivors, n, confidence)?;
            let p = survivors as f64 / n as f64;
            Ok(HoleEstimate {
                r,
                fraction: p,
                lo,
                hi,
                stderr: (p * (1.0 - p) / n as f64).sqrt(),
                survivors,
                samples: n,
            })
        })
        .collect()
}
