//! Checks that `sqrt(n) e_1^T U^k e_1` behave as independent standard
//! complex Gaussians.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{moment_cap, MomentVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateStats {
    /// Power `k` of this coordinate.
    pub k: usize,
    pub mean: Complex64,
    pub mean_re_z: f64,
    pub mean_im_z: f64,
    /// Sample mean of `|entry|^2`; one in the limit.
    pub variance: f64,
    pub variance_z: f64,
    /// Exact value `(n + k)/(n + 1)` at the sampled size.
    pub finite_n_variance: f64,
    /// Excess kurtosis of `|entry|^2`; 6 for an exponential law.
    pub excess_kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceStats {
    pub j: usize,
    pub k: usize,
    /// Sample mean of `x_j conj(x_k)`.
    pub value: Complex64,
    pub re_z: f64,
    pub im_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianityReport {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub coordinates: Vec<CoordinateStats>,
    pub covariances: Vec<CovarianceStats>,
    pub max_abs_z: f64,
    /// Some statistic has zero spread, so its z-score is undefined.
    pub degenerate: bool,
    pub z_limit: f64,
    pub pass: bool,
}

struct Moments {
    mean: f64,
    sd: f64,
}

fn moments(xs: impl Iterator<Item = f64> + Clone) -> Moments {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Moments {
        mean,
        sd: var.sqrt(),
    }
}

/// `(mean - target) / (sd / sqrt(n))`; `None` when the spread vanishes.
fn z_against(m: &Moments, target: f64, n: usize) -> Option<f64> {
    (m.sd > 0.0).then(|| (m.mean - target) * (n as f64).sqrt() / m.sd)
}

pub fn gaussianity_report(vectors: &[MomentVector], z_limit: f64) -> Result<GaussianityReport> {
    if vectors.len() < 2 {
        return Err(Error::invalid(
            "samples",
            "need at least two moment vectors",
        ));
    }
    let n = vectors[0].n;
    let m = vectors[0].entries.len();
    if let Some(v) = vectors.iter().find(|v| v.n != n || v.entries.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: v.entries.len(),
        });
    }
    if m == 0 || m > moment_cap(n) {
        return Err(Error::invalid(
            "m",
            format!("need 1 <= m <= n/4 = {}", moment_cap(n)),
        ));
    }
    let s = vectors.len();
    let mut degenerate = false;
    let mut zs = Vec::new();
    let mut push = |z: Option<f64>| -> f64 {
        match z {
            Some(z) => {
                zs.push(z);
                z
            }
            None => {
                degenerate = true;
                f64::NAN
            }
        }
    };
    let mut coordinates = Vec::with_capacity(m);
    for c in 0..m {
        let col = vectors.iter().map(move |v| v.entries[c]);
        let re = moments(col.clone().map(|x| x.re));
        let im = moments(col.clone().map(|x| x.im));
        let abs2 = moments(col.clone().map(|x| x.norm_sqr()));
        let kurt = {
            let mu = abs2.mean;
            let m2 = col
                .clone()
                .map(|x| (x.norm_sqr() - mu).powi(2))
                .sum::<f64>()
                / s as f64;
            let m4 = col
                .clone()
                .map(|x| (x.norm_sqr() - mu).powi(4))
                .sum::<f64>()
                / s as f64;
            if m2 > 0.0 {
                m4 / (m2 * m2) - 3.0
            } else {
                f64::NAN
            }
        };
        let k = c + 1;
        coordinates.push(CoordinateStats {
            k,
            mean: Complex64::new(re.mean, im.mean),
            mean_re_z: push(z_against(&re, 0.0, s)),
            mean_im_z: push(z_against(&im, 0.0, s)),
            variance: abs2.mean,
            variance_z: push(z_against(&abs2, 1.0, s)),
            finite_n_variance: (n + k) as f64 / (n + 1) as f64,
            excess_kurtosis: kurt,
        });
    }
    let mut covariances = Vec::new();
    for j in 0..m {
        for k in j + 1..m {
            let prod = vectors
                .iter()
                .map(move |v| v.entries[j] * v.entries[k].conj());
            let re = moments(prod.clone().map(|x| x.re));
            let im = moments(prod.clone().map(|x| x.im));
            covariances.push(CovarianceStats {
                j: j + 1,
                k: k + 1,
                value: Complex64::new(re.mean, im.mean),
                re_z: push(z_against(&re, 0.0, s)),
                im_z: push(z_against(&im, 0.0, s)),
            });
        }
    }
    let max_abs_z = zs.iter().map(|z| z.abs()).fold(0.0, f64::max);
    Ok(GaussianityReport {
        n,
        m,
        samples: s,
        coordinates,
        covariances,
        max_abs_z,
        degenerate,
        z_limit,
        pass: !degenerate && max_abs_z <= z_limit,
    })
}
