use serde::{Deserialize, Serialize};

use super::OracleContext;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoleRegime {
    /// `prod_{p >= 0} (1 - r^{2p+2})`; infinite `mu` only.
    ExactInfiniteMu,
    /// `1 - exp(-1/(r |mu|)^2)` as `r -> 0`; finite `mu` only.
    SmallR,
    /// `exp(-pi^2 / (12 (1 - r)))` as `r -> 1`. Conjectural.
    NearOne,
}

impl std::str::FromStr for HoleRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-infinite-mu" => Ok(Self::ExactInfiniteMu),
            "small-r" => Ok(Self::SmallR),
            "near-1" | "near-one" => Ok(Self::NearOne),
            _ => Err(Error::Parse(format!(
                "unknown hole regime `{s}` (expected exact-infinite-mu, small-r or near-1)"
            ))),
        }
    }
}

/// Probability that no point lies in the disk of radius `r`.
pub fn hole_probability(r: f64, ctx: &OracleContext, regime: HoleRegime) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::invalid("r", "need 0 <= r < 1"));
    }
    match regime {
        HoleRegime::ExactInfiniteMu => {
            if !ctx.mu.is_infinite() {
                return Err(Error::invalid(
                    "regime",
                    "the exact product exists only for infinite mu",
                ));
            }
            let r2 = r * r;
            let mut term = r2;
            let mut prod = 1.0;
            while term >= 1e-16 {
                prod *= 1.0 - term;
                term *= r2;
            }
            Ok(prod)
        }
        HoleRegime::SmallR => {
            if ctx.mu.is_infinite() {
                return Err(Error::invalid(
                    "regime",
                    "small-r asymptotic needs finite mu",
                ));
            }
            if r == 0.0 {
                return Ok(1.0);
            }
            let t = r * ctx.mu.modulus();
            Ok(-(-1.0 / (t * t)).exp_m1())
        }
        HoleRegime::NearOne => Ok((-std::f64::consts::PI.powi(2) / (12.0 * (1.0 - r))).exp()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu::Mu;

    #[test]
    fn exact_product() {
        let inf = OracleContext::infinite();
        assert_eq!(
            hole_probability(0.0, &inf, HoleRegime::ExactInfiniteMu).unwrap(),
            1.0
        );
        let v = hole_probability(0.5, &inf, HoleRegime::ExactInfiniteMu).unwrap();
        assert!((v - 0.688_537_537_120_339_7).abs() < 1e-15, "{v}");
        let fin = OracleContext::new(Mu::real(2.0)).unwrap();
        assert!(hole_probability(0.5, &fin, HoleRegime::ExactInfiniteMu).is_err());
    }

    #[test]
    fn small_r() {
        let ctx = OracleContext::new(Mu::real(2.0)).unwrap();
        let v = hole_probability(0.5, &ctx, HoleRegime::SmallR).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(hole_probability(0.5, &OracleContext::infinite(), HoleRegime::SmallR).is_err());
    }

    #[test]
    fn near_one_is_monotone() {
        let inf = OracleContext::infinite();
        let a = hole_probability(0.9, &inf, HoleRegime::NearOne).unwrap();
        let b = hole_probability(0.95, &inf, HoleRegime::NearOne).unwrap();
        assert!(b < a && a < 1.0);
        assert!(hole_probability(1.0, &inf, HoleRegime::NearOne).is_err());
    }
}
