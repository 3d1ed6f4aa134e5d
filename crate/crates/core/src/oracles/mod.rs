//! Closed-form densities, correlation functions and hole probabilities.
//!
//! All evaluations are pure functions of their arguments. Limiting formulas
//! take an [`OracleContext`]; only `|mu|` enters, through `c = 1/|mu|^2`.

mod correlations;
mod ddouble;
mod density;
mod hole;
mod identities;
mod kacrice;
mod sumrule;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mu::{format_complex, Mu};

pub use correlations::{
    apply_ddx_x, q_coefficients, q_coefficients_row_expansion, rho2_direct, rho2_limit, rho2_parts,
    rhok_determinantal, rhok_limit, set_partitions, truncated_correlation, LaurentExpPoly, SPencil,
    TwoPointParts, MAX_K, MAX_TRUNCATED_K,
};
pub use density::{density_finite_n, density_limit, kernel_k, Density, Support};
pub use hole::{hole_probability, HoleRegime};
pub use identities::{identity_suite, IdentityReport};
pub use kacrice::{rho1_kacrice, rho2_kacrice, CovarianceBlocks};
pub use sumrule::{sum_rule_defect, QuadratureSpec, SumRuleReport};

/// Smallest admissible `|1 - z_i conj(z_j)|`.
pub const SINGULARITY_GUARD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleContext {
    pub mu: Mu,
    /// `1/|mu|^2`, zero when `mu` is infinite.
    pub c: f64,
}

impl OracleContext {
    pub fn new(mu: Mu) -> Result<Self> {
        mu.validate()?;
        Ok(Self { mu, c: mu.c() })
    }

    pub fn infinite() -> Self {
        Self {
            mu: Mu::Infinite,
            c: 0.0,
        }
    }

    pub fn is_determinantal(&self) -> bool {
        self.c == 0.0
    }
}

pub(crate) fn check_in_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDisk {
            point: format_complex(z),
        })
    }
}

/// `1 - z conj(w)`, rejected when within [`SINGULARITY_GUARD`] of zero.
pub(crate) fn one_minus(z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - z * w.conj();
    if d.norm() < SINGULARITY_GUARD {
        return Err(Error::NearSingularity { distance: d.norm() });
    }
    Ok(d)
}

/// `exp(c (1 - 1/x)) * value`, combined in log space so results near the
/// bottom of the floating-point range keep their relative accuracy.
pub(crate) fn damped(c: f64, x: f64, value: f64) -> f64 {
    if c == 0.0 {
        return value;
    }
    let exponent = c * (1.0 - 1.0 / x);
    if value > 0.0 {
        (exponent + value.ln()).exp()
    } else {
        exponent.exp() * value
    }
}
