use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::compare::Curve;
use crate::error::{Error, Result};

/// Annulus-binned one-point density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub samples: usize,
    pub density: Vec<f64>,
    /// Poisson standard error `sqrt(count)/(samples area)`.
    pub stderr: Vec<f64>,
    /// Standard error from the spread of per-sample counts.
    pub empirical_stderr: Vec<f64>,
}

pub fn validate_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::invalid("edges", "need at least two edges"));
    }
    if edges[0] < 0.0 || *edges.last().unwrap() > 1.0 {
        return Err(Error::invalid("edges", "must lie within [0, 1]"));
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("edges", "must be strictly increasing"));
    }
    Ok(())
}

/// `bins + 1` equally spaced edges on `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect()
}

fn annulus_area(r0: f64, r1: f64) -> f64 {
    PI * (r1 * r1 - r0 * r0)
}

impl RadialHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn area(&self, bin: usize) -> f64 {
        annulus_area(self.edges[bin], self.edges[bin + 1])
    }

    /// Estimate as a curve over bin midpoints.
    pub fn curve(&self) -> Curve {
        Curve {
            x: self.midpoints(),
            value: self.density.clone(),
            stderr: self.stderr.clone(),
        }
    }
}

/// Counts points with modulus in `[r_b, r_{b+1})`; points outside all bins
/// are ignored.
pub fn estimate_radial_density<S: AsRef<[Complex64]>>(
    spectra: &[S],
    edges: &[f64],
) -> Result<RadialHistogram> {
    validate_edges(edges)?;
    if spectra.is_empty() {
        return Err(Error::invalid("spectra", "need at least one sample"));
    }
    let bins = edges.len() - 1;
    let mut counts = vec![0u64; bins];
    let mut sum_sq = vec![0f64; bins];
    let mut per_sample = vec![0u64; bins];
    for s in spectra {
        per_sample.iter_mut().for_each(|c| *c = 0);
        for z in s.as_ref() {
            let r = z.norm();
            if r < edges[0] || r >= edges[bins] {
                continue;
            }
            // first edge strictly greater than r, minus one
            let b = edges.partition_point(|&e| e <= r) - 1;
            per_sample[b] += 1;
        }
        for b in 0..bins {
            counts[b] += per_sample[b];
            sum_sq[b] += (per_sample[b] * per_sample[b]) as f64;
        }
    }
    let samples = spectra.len();
    let sf = samples as f64;
    let mut density = Vec::with_capacity(bins);
    let mut stderr = Vec::with_capacity(bins);
    let mut empirical = Vec::with_capacity(bins);
    for b in 0..bins {
        let norm = sf * annulus_area(edges[b], edges[b + 1]);
        let c = counts[b] as f64;
        density.push(c / norm);
        stderr.push(c.sqrt() / norm);
        let mean = c / sf;
        let var = if samples > 1 {
            ((sum_sq[b] - sf * mean * mean) / (sf - 1.0)).max(0.0)
        } else {
            0.0
        };
        empirical.push((var / sf).sqrt() / annulus_area(edges[b], edges[b + 1]));
    }
    Ok(RadialHistogram {
        edges: edges.to_vec(),
        counts,
        samples,
        density,
        stderr,
        empirical_stderr: empirical,
    })
}

const ANNULUS_NODES: usize = 32;

/// Mean of a radial density over the annulus `r0 <= |z| < r1`; the density
/// vanishes below `support_min`.
pub fn annulus_average<F>(r0: f64, r1: f64, support_min: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lo = r0.max(support_min);
    if lo >= r1 {
        return Ok(0.0);
    }
    let gl = GaussLegendre::new(ANNULUS_NODES.try_into().expect("nonzero"));
    let mut total = 0.0;
    for (x, w) in gl.nodes().zip(gl.weights()) {
        let r = 0.5 * (r1 - lo) * x + 0.5 * (r1 + lo);
        total += w * 2.0 * PI * r * f(r)?;
    }
    Ok(0.5 * (r1 - lo) * total / annulus_area(r0, r1))
}

/// Oracle curve of annulus averages, on the same midpoints as the histogram.
pub fn radial_oracle_curve<F>(edges: &[f64], support_min: f64, f: F) -> Result<Curve>
where
    F: Fn(f64) -> Result<f64>,
{
    validate_edges(edges)?;
    let mut x = Vec::with_capacity(edges.len() - 1);
    let mut value = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        x.push(0.5 * (w[0] + w[1]));
        value.push(annulus_average(w[0], w[1], support_min, &f)?);
    }
    let stderr = vec![0.0; x.len()];
    Ok(Curve { x, value, stderr })
}

/// Which bins enter a radial comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinFilter {
    pub r_min: f64,
    pub r_max: f64,
    /// Minimum expected count `samples * area * oracle`.
    pub min_expected: f64,
}

impl BinFilter {
    /// Indices of bins inside `[r_min, r_max]` with enough expected points.
    pub fn select(&self, hist: &RadialHistogram, oracle: &Curve) -> Vec<usize> {
        (0..hist.bins())
            .filter(|&b| {
                let (lo, hi) = (hist.edges[b], hist.edges[b + 1]);
                let expected = hist.samples as f64 * hist.area(b) * oracle.value[b];
                lo >= self.r_min - 1e-12
                    && hi <= self.r_max + 1e-12
                    && expected >= self.min_expected
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_and_empty_bins() {
        let pts = vec![vec![
            Complex64::new(0.05, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.99, 0.0),
        ]];
        let h = estimate_radial_density(&pts, &[0.0, 0.25, 0.5, 0.75, 0.95]).unwrap();
        assert_eq!(h.counts, vec![1, 0, 2, 0]);
        assert_eq!(h.density[1], 0.0);
        assert!((h.density[2] - 2.0 / (PI * (0.5625 - 0.25))).abs() < 1e-14);
    }

    #[test]
    fn bad_edges() {
        let pts: Vec<Vec<Complex64>> = vec![vec![]];
        assert!(estimate_radial_density(&pts, &[0.0]).is_err());
        assert!(estimate_radial_density(&pts, &[0.0, 0.5, 0.5]).is_err());
        assert!(estimate_radial_density(&pts, &[0.0, 1.2]).is_err());
    }

    #[test]
    fn annulus_average_of_constant() {
        let v = annulus_average(0.2, 0.4, 0.0, |_| Ok(3.0)).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
        let s = 0.1f64.sqrt();
        let v = annulus_average(0.2, 0.4, s, |_| Ok(1.0)).unwrap();
        assert!((v - (0.16 - 0.1) / (0.16 - 0.04)).abs() < 1e-13);
    }
}
