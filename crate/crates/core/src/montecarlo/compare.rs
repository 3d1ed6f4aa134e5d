use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Values at abscissae `x`, with standard errors (zero for oracles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub value: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl Curve {
    pub fn exact(x: Vec<f64>, value: Vec<f64>) -> Self {
        let stderr = vec![0.0; x.len()];
        Self { x, value, stderr }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            x: indices.iter().map(|&i| self.x[i]).collect(),
            value: indices.iter().map(|&i| self.value[i]).collect(),
            stderr: indices.iter().map(|&i| self.stderr[i]).collect(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.value.len() != self.x.len() || self.stderr.len() != self.x.len() {
            return Err(Error::GridMismatch("curve columns differ in length".into()));
        }
        Ok(())
    }
}

/// Per-point limit and family-wise significance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub z_limit: f64,
    pub alpha: f64,
}

impl Default for Criterion {
    fn default() -> Self {
        Self {
            z_limit: 3.0,
            alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub x: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub oracle: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub oracle: String,
    pub points: Vec<ComparisonPoint>,
    pub max_abs_z: f64,
    /// Share of points with `|z| <= 2`.
    pub within_two: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub criterion: Criterion,
    pub pass: bool,
    /// Seed, spec and anything else that reproduces the estimate.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub provenance: serde_json::Value,
}

const GRID_TOL: f64 = 1e-12;

fn z_score(estimate: f64, oracle: f64, se: f64) -> f64 {
    let d = estimate - oracle;
    if d == 0.0 {
        0.0
    } else if se > 0.0 {
        d / se
    } else {
        f64::INFINITY.copysign(d)
    }
}

/// Pointwise z-scores against the combined standard error, plus the χ² of
/// their squares. Passes when every `|z|` is within the limit and the χ²
/// p-value is at least `alpha`.
pub fn compare(
    estimate: &Curve,
    oracle: &Curve,
    oracle_name: &str,
    criterion: Criterion,
) -> Result<ComparisonReport> {
    estimate.check()?;
    oracle.check()?;
    if estimate.len() != oracle.len() {
        return Err(Error::GridMismatch(format!(
            "{} estimate points vs {} oracle points",
            estimate.len(),
            oracle.len()
        )));
    }
    if estimate.is_empty() {
        return Err(Error::GridMismatch("no points to compare".into()));
    }
    let mut points = Vec::with_capacity(estimate.len());
    for i in 0..estimate.len() {
        let (xe, xo) = (estimate.x[i], oracle.x[i]);
        if (xe - xo).abs() > GRID_TOL * xe.abs().max(xo.abs()).max(1.0) {
            return Err(Error::GridMismatch(format!("abscissa {i}: {xe} vs {xo}")));
        }
        let se = estimate.stderr[i].hypot(oracle.stderr[i]);
        points.push(ComparisonPoint {
            x: xe,
            estimate: estimate.value[i],
            stderr: se,
            oracle: oracle.value[i],
            z: z_score(estimate.value[i], oracle.value[i], se),
        });
    }
    let max_abs_z = points.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    let within_two =
        points.iter().filter(|p| p.z.abs() <= 2.0).count() as f64 / points.len() as f64;
    let chi2: f64 = points.iter().map(|p| p.z * p.z).sum();
    let dof = points.len();
    let p_value = if chi2.is_finite() {
        let dist = ChiSquared::new(dof as f64).expect("dof >= 1");
        dist.sf(chi2)
    } else {
        0.0
    };
    let pass = max_abs_z <= criterion.z_limit && p_value >= criterion.alpha;
    Ok(ComparisonReport {
        oracle: oracle_name.to_string(),
        points,
        max_abs_z,
        within_two,
        chi2,
        dof,
        p_value,
        criterion,
        pass,
        provenance: serde_json::Value::Null,
    })
}

impl ComparisonReport {
    pub fn with_provenance(mut self, provenance: serde_json::Value) -> Self {
        self.provenance = provenance;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle() -> Curve {
        Curve::exact(vec![0.1, 0.2, 0.3], vec![1.0, 2.0, 3.0])
    }

    #[test]
    fn self_comparison_passes_exactly() {
        let r = compare(&oracle(), &oracle(), "self", Criterion::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.chi2, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn shifted_oracle_fails() {
        let mut est = oracle();
        est.stderr = vec![0.01; 3];
        let shifted = Curve::exact(est.x.clone(), est.value.iter().map(|v| v * 1.1).collect());
        let r = compare(&est, &shifted, "shifted", Criterion::default()).unwrap();
        assert!(!r.pass);
        assert!(r.max_abs_z > 9.0);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let other = Curve::exact(vec![0.1, 0.25, 0.3], vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            compare(&oracle(), &other, "x", Criterion::default()),
            Err(Error::GridMismatch(_))
        ));
        let short = Curve::exact(vec![0.1], vec![1.0]);
        assert!(compare(&oracle(), &short, "x", Criterion::default()).is_err());
    }

    #[test]
    fn report_round_trips_with_provenance() {
        let r = compare(&oracle(), &oracle(), "self", Criterion::default())
            .unwrap()
            .with_provenance(serde_json::json!({"seed": 7, "spec": {"n": 4}}));
        let s = serde_json::to_string(&r).unwrap();
        let back: ComparisonReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.provenance["seed"], 7);
    }
}
