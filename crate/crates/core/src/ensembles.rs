//! Random matrix ensembles: Ginibre, Haar unitary, truncated unitary, the
//! multiplicative rank-one perturbation `U A` with `A = diag(a, 1, ..., 1)`,
//! and the additive rank-one model `(X + mu 1 g^T)/sqrt(n)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_default, CMatrix, HouseholderQr, LinearOperator, Lu, ONE, ZERO};
use crate::mu::Mu;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Ginibre,
    HaarUnitary,
    TruncatedUnitary,
    Ua,
    Rank1Additive,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "ginibre" => Self::Ginibre,
            "haar_unitary" | "haar" => Self::HaarUnitary,
            "truncated_unitary" | "truncated" => Self::TruncatedUnitary,
            "ua" => Self::Ua,
            "rank1_additive" | "additive" => Self::Rank1Additive,
            other => {
                return Err(Error::invalid(
                    "ensemble",
                    format!("unknown ensemble `{other}`"),
                ))
            }
        })
    }
}

/// Ensemble parameters. `a` is only meaningful for `Ua`; when absent it is
/// derived from `mu` as `a = 1/(mu sqrt(n))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Mu>,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            a: None,
            mu: None,
            seed,
        }
    }

    pub fn ua_with_a(n: usize, a: Complex64, seed: u64) -> Self {
        Self {
            a: Some(a),
            ..Self::new(EnsembleKind::Ua, n, seed)
        }
    }

    pub fn ua_with_mu(n: usize, mu: Mu, seed: u64) -> Self {
        Self {
            mu: Some(mu),
            ..Self::new(EnsembleKind::Ua, n, seed)
        }
    }

    pub fn rank1_additive(n: usize, mu: Complex64, seed: u64) -> Self {
        Self {
            mu: Some(Mu::Finite(mu)),
            ..Self::new(EnsembleKind::Rank1Additive, n, seed)
        }
    }

    /// The `a` of `A = diag(a, 1, ..., 1)`.
    pub fn resolved_a(&self) -> Result<Complex64> {
        match (self.a, self.mu) {
            (Some(a), _) => Ok(a),
            (None, Some(Mu::Infinite)) => Ok(ZERO),
            (None, Some(Mu::Finite(mu))) => Ok((mu * (self.n as f64).sqrt()).inv()),
            (None, None) => Err(Error::invalid("a", "UA ensemble needs `a` or `mu`")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if let Some(mu) = self.mu {
            mu.validate()?;
        }
        match self.kind {
            EnsembleKind::TruncatedUnitary if self.n < 2 => {
                Err(Error::invalid("n", "truncated unitary needs n >= 2"))
            }
            EnsembleKind::Ua => {
                let a = self.resolved_a()?;
                if !(a.norm() < 1.0) {
                    return Err(Error::invalid(
                        "a",
                        format!("|a| = {} but must be < 1", a.norm()),
                    ));
                }
                Ok(())
            }
            EnsembleKind::Rank1Additive => match self.mu {
                Some(Mu::Finite(_)) => Ok(()),
                _ => Err(Error::invalid("mu", "additive model needs a finite mu")),
            },
            _ => Ok(()),
        }
    }

    /// Number of eigenvalues per sample.
    pub fn spectrum_len(&self) -> usize {
        match self.kind {
            EnsembleKind::TruncatedUnitary => self.n - 1,
            _ => self.n,
        }
    }

    /// Draws the matrix for `sample_index` on its own stream.
    pub fn sample_matrix(&self, sample_index: u64) -> Result<CMatrix> {
        self.validate()?;
        let mut rng = RngStream::new(self.seed, sample_index);
        match self.kind {
            EnsembleKind::Ginibre => Ok(sample_ginibre(self.n, &mut rng)),
            EnsembleKind::HaarUnitary => sample_haar_unitary(self.n, &mut rng),
            EnsembleKind::TruncatedUnitary => sample_truncated_unitary(self.n, &mut rng),
            EnsembleKind::Ua => sample_ua(self.n, self.resolved_a()?, &mut rng),
            EnsembleKind::Rank1Additive => {
                let Some(Mu::Finite(mu)) = self.mu else {
                    unreachable!("validated")
                };
                Ok(sample_rank1_additive(self.n, mu, &mut rng))
            }
        }
    }

    pub fn sample_spectrum(&self, sample_index: u64) -> Result<Spectrum> {
        let m = self.sample_matrix(sample_index)?;
        Ok(Spectrum {
            values: eigenvalues_default(&m)?,
            spec: *self,
            sample_index,
        })
    }
}

/// Eigenvalues of one sample plus where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub spec: EnsembleSpec,
    pub sample_index: u64,
}

impl AsRef<[Complex64]> for Spectrum {
    fn as_ref(&self) -> &[Complex64] {
        &self.values
    }
}

pub fn sample_ginibre(n: usize, rng: &mut RngStream) -> CMatrix {
    let mut data = vec![ZERO; n * n];
    rng.fill_standard_complex_gaussian(&mut data);
    CMatrix::from_row_major(n, data).expect("n >= 1")
}

/// Haar unitary in factored form; apply it without materialising.
pub fn sample_haar_factor(n: usize, rng: &mut RngStream) -> Result<HouseholderQr> {
    HouseholderQr::factor(sample_ginibre(n, rng))
}

/// Haar unitary: `Q` of the phase-normalised QR of a Ginibre matrix.
pub fn sample_haar_unitary(n: usize, rng: &mut RngStream) -> Result<CMatrix> {
    Ok(sample_haar_factor(n, rng)?.q())
}

/// `U A` with `U` Haar and `A = diag(a, 1, ..., 1)`.
pub fn sample_ua(n: usize, a: Complex64, rng: &mut RngStream) -> Result<CMatrix> {
    if !(a.norm() < 1.0) {
        return Err(Error::invalid(
            "a",
            format!("|a| = {} but must be < 1", a.norm()),
        ));
    }
    let mut u = sample_haar_unitary(n, rng)?;
    apply_a(&mut u, a);
    Ok(u)
}

/// Right-multiplies by `diag(a, 1, ..., 1)`.
pub fn apply_a(u: &mut CMatrix, a: Complex64) {
    for i in 0..u.n() {
        u[(i, 0)] *= a;
    }
}

/// The `(n-1) x (n-1)` block of a Haar unitary with first row and column removed.
pub fn sample_truncated_unitary(n: usize, rng: &mut RngStream) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::invalid("n", "truncated unitary needs n >= 2"));
    }
    let u = sample_haar_unitary(n, rng)?;
    Ok(CMatrix::from_fn(n - 1, |i, j| u[(i + 1, j + 1)]))
}

/// `(X + mu 1_n g^T)/sqrt(n)`; `X` is drawn first, then `g`.
pub fn sample_rank1_additive(n: usize, mu: Complex64, rng: &mut RngStream) -> CMatrix {
    let x = sample_ginibre(n, rng);
    let g: Vec<Complex64> = (0..n).map(|_| rng.standard_complex_gaussian()).collect();
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, |i, j| (x[(i, j)] + mu * g[j]) * scale)
}

/// `sqrt(n) e_1^T U^k e_1` for `k = 1..=m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub n: usize,
    pub entries: Vec<Complex64>,
}

/// Largest `m` accepted by [`moment_vector`] for a given `n`.
pub fn moment_cap(n: usize) -> usize {
    n / 4
}

/// Power-trace moments by repeated application to `e_1`, O(m n^2).
pub fn moment_vector<O: LinearOperator + ?Sized>(u: &O, m: usize) -> Result<MomentVector> {
    let n = u.dim();
    if m == 0 || m > moment_cap(n) {
        return Err(Error::invalid(
            "m",
            format!("need 1 <= m <= n/4 = {}, got {m}", moment_cap(n)),
        ));
    }
    let root_n = (n as f64).sqrt();
    let mut v = vec![ZERO; n];
    v[0] = ONE;
    let mut entries = Vec::with_capacity(m);
    for _ in 0..m {
        v = u.apply(&v);
        entries.push(v[0] * root_n);
    }
    Ok(MomentVector { n, entries })
}

/// `1 - (lambda/a) e_1^T (I - lambda U^† I')^{-1} U^† e_1` with `I' = diag(0, 1, ..., 1)`,
/// by a dense linear solve. Vanishes exactly at eigenvalues of `U A`.
pub fn scalar_equation_residual(u: &CMatrix, a: Complex64, lambda: Complex64) -> Result<Complex64> {
    if a == ZERO {
        return Err(Error::invalid("a", "residual form needs a != 0"));
    }
    let n = u.n();
    // B = I - lambda U^† I': column 0 of U^† I' is zero
    let b = CMatrix::from_fn(n, |i, j| {
        let delta = if i == j { ONE } else { ZERO };
        if j == 0 {
            delta
        } else {
            delta - lambda * u[(j, i)].conj()
        }
    });
    let rhs: Vec<Complex64> = (0..n).map(|i| u[(0, i)].conj()).collect();
    let x = Lu::new(&b)?.solve(&rhs)?;
    Ok(ONE - lambda / a * x[0])
}

/// Same quantity through the truncated geometric series
/// `sum_{k=0}^{terms-1} lambda^k e_1^T (U^† I')^k U^† e_1`.
pub fn scalar_equation_residual_series(
    u: &CMatrix,
    a: Complex64,
    lambda: Complex64,
    terms: usize,
) -> Result<Complex64> {
    if a == ZERO {
        return Err(Error::invalid("a", "residual form needs a != 0"));
    }
    let n = u.n();
    let ud = u.adjoint();
    let mut v: Vec<Complex64> = (0..n).map(|i| ud[(i, 0)]).collect();
    let mut sum = ZERO;
    let mut power = ONE;
    for _ in 0..terms {
        sum += power * v[0];
        power *= lambda;
        v[0] = ZERO;
        v = ud.mul_vec(&v)?;
    }
    Ok(ONE - lambda / a * sum)
}

/// `| |prod lambda|^2 - |a|^2 | / |a|^2`; zero for exact `U A` spectra.
pub fn ua_product_defect(values: &[Complex64], a: Complex64) -> f64 {
    let log_prod: f64 = values.iter().map(|z| z.norm_sqr().ln()).sum();
    let target = a.norm_sqr();
    ((log_prod - target.ln()).exp() - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_default;

    #[test]
    fn ginibre_entry_moments() {
        let samples = 100_000;
        let mut mean = ZERO;
        let mut second = 0.0;
        for s in 0..samples {
            let mut rng = RngStream::new(42, s);
            let m = sample_ginibre(2, &mut rng);
            mean += m[(0, 0)];
            second += m[(0, 0)].norm_sqr();
        }
        let n = samples as f64;
        assert!((mean / n).norm() < 0.01);
        assert!((second / n - 1.0).abs() < 0.01);
    }

    #[test]
    fn haar_is_unitary_and_phase_uniform() {
        let mut rng = RngStream::new(1, 0);
        let u = sample_haar_unitary(40, &mut rng).unwrap();
        assert!(u.unitarity_defect() < 1e-12);

        let mut mean = ZERO;
        for s in 0..100_000 {
            let mut rng = RngStream::new(8, s);
            let u = sample_haar_unitary(1, &mut rng).unwrap();
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
            mean += u[(0, 0)];
        }
        assert!((mean / 100_000.0).norm() < 0.01);
    }

    #[test]
    fn ua_scalar_case() {
        let a = Complex64::new(0.3, -0.2);
        let mut rng = RngStream::new(5, 0);
        let m = sample_ua(1, a, &mut rng).unwrap();
        assert!((m[(0, 0)].norm() - a.norm()).abs() < 1e-15);
    }

    #[test]
    fn ua_product_constraint_small() {
        let a = Complex64::new(0.5, 0.0);
        for s in 0..20 {
            let mut rng = RngStream::new(6, s);
            let m = sample_ua(2, a, &mut rng).unwrap();
            let e = eigenvalues_default(&m).unwrap();
            let prod: f64 = e.iter().map(|z| z.norm()).product();
            assert!((prod - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn ua_with_zero_a_has_zero_eigenvalue() {
        let mut rng = RngStream::new(7, 0);
        let m = sample_ua(6, ZERO, &mut rng).unwrap();
        let e = eigenvalues_default(&m).unwrap();
        assert_eq!(e.iter().filter(|z| z.norm() < 1e-8).count(), 1);
    }

    #[test]
    fn ua_rejects_large_a() {
        let mut rng = RngStream::new(7, 0);
        assert!(sample_ua(3, Complex64::new(1.0, 0.0), &mut rng).is_err());
        assert!(EnsembleSpec::ua_with_a(3, Complex64::new(0.0, 1.5), 0)
            .validate()
            .is_err());
        assert!(EnsembleSpec::ua_with_mu(4, Mu::real(0.4), 0)
            .validate()
            .is_err());
        assert!(EnsembleSpec::ua_with_mu(4, Mu::real(1.0), 0)
            .validate()
            .is_ok());
    }

    #[test]
    fn ua_eigenvalue_moduli_lie_in_annulus() {
        let a = Complex64::new(0.0, 0.2);
        let mut rng = RngStream::new(9, 0);
        let m = sample_ua(30, a, &mut rng).unwrap();
        for z in eigenvalues_default(&m).unwrap() {
            assert!(z.norm() >= 0.2 - 1e-10 && z.norm() <= 1.0 + 1e-10, "{z}");
        }
    }

    #[test]
    fn truncated_is_a_contraction() {
        let mut rng = RngStream::new(10, 0);
        let t = sample_truncated_unitary(25, &mut rng).unwrap();
        for z in eigenvalues_default(&t).unwrap() {
            assert!(z.norm() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn truncated_two_by_two_second_moment() {
        // columns of a Haar unitary are uniform on the sphere, so E|U_22|^2 = 1/n
        let mut acc = 0.0;
        let samples = 100_000;
        for s in 0..samples {
            let mut rng = RngStream::new(12, s);
            acc += sample_truncated_unitary(2, &mut rng).unwrap()[(0, 0)].norm_sqr();
        }
        assert!((acc / samples as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn additive_deterministic_and_centered() {
        let spec = EnsembleSpec::rank1_additive(5, Complex64::new(2.0, 1.0), 3);
        assert_eq!(
            spec.sample_matrix(4).unwrap(),
            spec.sample_matrix(4).unwrap()
        );
        let mut mean = ZERO;
        for s in 0..20_000 {
            mean += spec.sample_matrix(s).unwrap()[(0, 0)];
        }
        // entry variance is (1 + |mu|^2)/n = 1.2
        assert!((mean / 20_000.0).norm() < 4.0 * (1.2f64 / 20_000.0).sqrt());
    }

    #[test]
    fn additive_with_zero_mu_has_circular_law_radius() {
        // oracle: the spectral radius of X/sqrt(n) tends to one
        let mut rng = RngStream::new(13, 0);
        let m = sample_rank1_additive(200, ZERO, &mut rng);
        let radius = eigenvalues_default(&m)
            .unwrap()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!((radius - 1.0).abs() < 0.15, "{radius}");
    }

    #[test]
    fn moment_vector_of_identity() {
        let mv = moment_vector(&CMatrix::identity(4), 1).unwrap();
        assert_eq!(mv.entries, vec![Complex64::new(2.0, 0.0)]);
        assert!(moment_vector(&CMatrix::identity(4), 2).is_err());
        assert!(moment_vector(&CMatrix::identity(4), 0).is_err());
    }

    #[test]
    fn moment_vector_implicit_matches_dense() {
        let mut rng = RngStream::new(14, 0);
        let f = sample_haar_factor(32, &mut rng).unwrap();
        let a = moment_vector(&f, 8).unwrap();
        let b = moment_vector(&f.q(), 8).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x - y).norm() < 1e-12);
            assert!(x.norm() <= 32f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn scalar_residual_one_by_one() {
        let theta = 0.7;
        let u = CMatrix::from_diag(&[Complex64::from_polar(1.0, theta)]);
        let a = Complex64::new(0.4, 0.1);
        let lambda = a * Complex64::from_polar(1.0, theta);
        assert!(scalar_equation_residual(&u, a, lambda).unwrap().norm() < 1e-15);
        assert_eq!(scalar_equation_residual(&u, a, ZERO).unwrap(), ONE);
    }

    #[test]
    fn scalar_residual_vanishes_at_eigenvalues() {
        let a = Complex64::new(0.1, 0.05);
        let mut rng = RngStream::new(15, 0);
        let u = sample_haar_unitary(30, &mut rng).unwrap();
        let mut ua = u.clone();
        apply_a(&mut ua, a);
        for lambda in eigenvalues_default(&ua).unwrap() {
            let r = scalar_equation_residual(&u, a, lambda).unwrap();
            assert!(r.norm() < 1e-8, "{lambda} -> {r}");
        }
        // a point that is not an eigenvalue
        assert!(
            scalar_equation_residual(&u, a, Complex64::new(0.01, 0.0))
                .unwrap()
                .norm()
                > 1e-3
        );
    }

    #[test]
    fn series_form_agrees_inside_disk() {
        let a = Complex64::new(0.2, 0.0);
        let mut rng = RngStream::new(16, 0);
        let u = sample_haar_unitary(12, &mut rng).unwrap();
        let lambda = Complex64::new(0.3, -0.2);
        let direct = scalar_equation_residual(&u, a, lambda).unwrap();
        let terms = 60;
        let series = scalar_equation_residual_series(&u, a, lambda, terms).unwrap();
        let bound = lambda.norm().powi(terms as i32 + 1) * 12.0;
        assert!(
            (direct - series).norm() < bound.max(1e-14),
            "{direct} {series}"
        );
    }

    #[test]
    fn phase_rotation_rotates_spectrum() {
        let a = Complex64::new(0.3, 0.0);
        let phi = 0.4;
        let mut rng = RngStream::new(17, 0);
        let u = sample_haar_unitary(10, &mut rng).unwrap();
        let mut ua = u.clone();
        apply_a(&mut ua, a);
        let mut rotated = u.scale(Complex64::from_polar(1.0, phi));
        apply_a(&mut rotated, a);
        let e1 = eigenvalues_default(&ua).unwrap();
        let e2 = eigenvalues_default(&rotated).unwrap();
        for z in &e1 {
            let target = z * Complex64::from_polar(1.0, phi);
            let best = e2
                .iter()
                .map(|w| (w - target).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10);
        }
    }

    #[test]
    fn spectrum_lengths() {
        let spec = EnsembleSpec::new(EnsembleKind::TruncatedUnitary, 5, 1);
        assert_eq!(spec.sample_spectrum(0).unwrap().values.len(), 4);
        let spec = EnsembleSpec::ua_with_mu(5, Mu::Infinite, 1);
        assert_eq!(spec.resolved_a().unwrap(), ZERO);
        assert_eq!(spec.sample_spectrum(0).unwrap().values.len(), 5);
    }
}
