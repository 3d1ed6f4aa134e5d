//! The coupling parameter `mu`, which may be infinite.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// `mu` of the shifted series `1/mu - sum c_j z^j`.
///
/// `Infinite` is an explicit flag so the pure-Kac limit has an exactly zero
/// shift rather than a very small float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mu {
    Infinite,
    Finite(Complex64),
}

impl Mu {
    pub fn real(x: f64) -> Self {
        Mu::Finite(Complex64::new(x, 0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Mu::Infinite)
    }

    /// `1/mu`, zero when infinite.
    pub fn shift(&self) -> Complex64 {
        match self {
            Mu::Infinite => Complex64::new(0.0, 0.0),
            Mu::Finite(m) => m.inv(),
        }
    }

    /// `1/|mu|^2`, zero when infinite.
    pub fn c(&self) -> f64 {
        match self {
            Mu::Infinite => 0.0,
            Mu::Finite(m) => 1.0 / m.norm_sqr(),
        }
    }

    pub fn modulus(&self) -> f64 {
        match self {
            Mu::Infinite => f64::INFINITY,
            Mu::Finite(m) => m.norm(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Mu::Infinite => Mu::Infinite,
            Mu::Finite(m) => Mu::Finite(m.conj()),
        }
    }

    pub(crate) fn validate(&self) -> crate::error::Result<()> {
        match self {
            Mu::Finite(m) if !(m.re.is_finite() && m.im.is_finite()) || m.norm() == 0.0 => {
                Err(Error::invalid("mu", "must be finite and nonzero, or `inf`"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mu::Infinite => f.write_str("inf"),
            Mu::Finite(m) => f.write_str(&format_complex(*m)),
        }
    }
}

impl FromStr for Mu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Mu::Infinite);
        }
        let mu = Mu::Finite(parse_complex(t)?);
        mu.validate()?;
        Ok(mu)
    }
}

impl Serialize for Mu {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Mu {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Formats as `re+imi` / `re-imi`, the inverse of [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `x`, `yi`, `x+yi`, `x-yi` (exponents allowed, e.g. `1e-3-2.5e2i`).
pub fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let bad = || Error::Parse(format!("`{s}` is not a complex number (expected re+imi)"));
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|x| Complex64::new(x, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(
            parse_complex("1e-3+2e2i").unwrap(),
            Complex64::new(1e-3, 200.0)
        );
        assert_eq!(
            parse_complex("-1e-3-2E-2i").unwrap(),
            Complex64::new(-1e-3, -0.02)
        );
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn mu_round_trip() {
        for s in ["inf", "1", "0.5+2i", "-3-0.25i"] {
            let mu: Mu = s.parse().unwrap();
            assert_eq!(mu.to_string().parse::<Mu>().unwrap(), mu);
        }
        assert!("0".parse::<Mu>().is_err());
        assert_eq!(Mu::Infinite.c(), 0.0);
        assert_eq!(Mu::real(2.0).c(), 0.25);
    }
}
