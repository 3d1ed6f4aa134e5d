//! Truncated random Maclaurin series `q(z) = 1/mu - sum_{j=1}^N c_j z^j` and
//! its zeros.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_default, CMatrix, ONE, ZERO};
use crate::mu::Mu;
use crate::rng::RngStream;

/// Default degree cap; beyond it double precision coefficient dynamics
/// degrade the root residuals.
pub const MAX_DEGREE: usize = 2048;

/// Fixed angular offset of the initial Aberth circles (golden-ratio radians).
const START_ANGLE: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KacDraw {
    pub degree: usize,
    pub mu: Mu,
    /// `c_1, ..., c_N`; there is no `c_0`.
    pub coefficients: Vec<Complex64>,
}

impl KacDraw {
    pub fn new(mu: Mu, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("degree", "must be at least 1"));
        }
        mu.validate()?;
        Ok(Self {
            degree: coefficients.len(),
            mu,
            coefficients,
        })
    }

    /// Ascending coefficients of `q`: `[1/mu, -c_1, ..., -c_N]`.
    pub fn q_coefficients(&self) -> Vec<Complex64> {
        std::iter::once(self.mu.shift())
            .chain(self.coefficients.iter().map(|c| -c))
            .collect()
    }

    /// `q(z)` by Horner.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        horner(&self.q_coefficients(), z)
    }

    /// Coefficient-wise conjugate (with `mu` conjugated too).
    pub fn conj(&self) -> Self {
        Self {
            degree: self.degree,
            mu: self.mu.conj(),
            coefficients: self.coefficients.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// i.i.d. standard complex Gaussian `c_1..c_N`.
pub fn sample_kac(degree: usize, mu: Mu, rng: &mut RngStream) -> Result<KacDraw> {
    if degree == 0 {
        return Err(Error::invalid("degree", "must be at least 1"));
    }
    if degree > MAX_DEGREE {
        return Err(Error::invalid("degree", format!("capped at {MAX_DEGREE}")));
    }
    let mut coefficients = vec![ZERO; degree];
    rng.fill_standard_complex_gaussian(&mut coefficients);
    KacDraw::new(mu, coefficients)
}

/// Ascending coefficients of `q / (-c_N)`, leading coefficient one.
pub fn to_monic_coefficients(draw: &KacDraw) -> Result<Vec<Complex64>> {
    let lead = *draw.coefficients.last().expect("degree >= 1");
    if lead == ZERO {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let scale = -lead.inv();
    let mut monic: Vec<Complex64> = draw.q_coefficients().iter().map(|q| q * scale).collect();
    *monic.last_mut().unwrap() = ONE;
    Ok(monic)
}

#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    /// Converged once every correction is below `tol * max(1, |z|)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AberthOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 500,
        }
    }
}

/// Output of the simultaneous iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Roots {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    /// Largest normalised backward error `|p(r)| / sum_i |p_i| |r|^i`.
    pub residual_bound: f64,
}

/// Zeros of one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residual_bound: f64,
    pub draw: KacDraw,
}

impl RootSet {
    /// Roots without the origin root that is forced when `mu` is infinite
    /// (`q` then has no constant term).
    pub fn free_roots(&self) -> Vec<Complex64> {
        let mut roots = self.roots.clone();
        if self.draw.mu.is_infinite() {
            if let Some(k) = roots.iter().position(|z| *z == ZERO) {
                roots.swap_remove(k);
            }
        }
        roots
    }
}

impl AsRef<[Complex64]> for RootSet {
    fn as_ref(&self) -> &[Complex64] {
        &self.roots
    }
}

#[inline]
fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// `p(z)/p'(z)` for the ascending coefficients `b`, evaluated on the reversed
/// polynomial outside the unit disk so large `|z|` never overflows.
#[inline]
fn newton_ratio(b: &[Complex64], z: Complex64) -> Complex64 {
    let d = b.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let mut p = b[d];
        let mut dp = ZERO;
        for &c in b[..d].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        if p == ZERO {
            return ZERO;
        }
        p / dp
    } else {
        let w = z.inv();
        let mut p = b[0];
        let mut dp = ZERO;
        for &c in &b[1..] {
            dp = dp * w + p;
            p = p * w + c;
        }
        if p == ZERO {
            return ZERO;
        }
        // p'/p (z) = w (d - w p~'(w) / p~(w))
        let log_deriv = w * (d as f64 - w * dp / p);
        log_deriv.inv()
    }
}

/// `|p(r)| / sum_i |b_i| |r|^i`, scale-free and overflow-safe.
pub fn backward_error(b: &[Complex64], r: Complex64) -> f64 {
    let (value, scale) = if r.norm_sqr() <= 1.0 {
        let rn = r.norm();
        (
            horner(b, r).norm(),
            b.iter().rev().fold(0.0, |acc, c| acc * rn + c.norm()),
        )
    } else {
        let w = r.inv();
        let wn = w.norm();
        (
            b.iter().fold(ZERO, |acc, &c| acc * w + c).norm(),
            b.iter().fold(0.0, |acc, c| acc * wn + c.norm()),
        )
    };
    if scale == 0.0 {
        0.0
    } else {
        value / scale
    }
}

/// Unique positive root of `x^d - sum_{i<d} |b_i| x^i`, an upper bound on the
/// moduli of all roots. Bisection on `ln x` with a log-sum-exp evaluation, so
/// it cannot overflow at high degree.
pub fn cauchy_radius(b: &[Complex64]) -> f64 {
    let d = b.len() - 1;
    let logs: Vec<(usize, f64)> = b[..d]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    if logs.is_empty() {
        return 0.0;
    }
    // g(t) = ln sum_i |b_i| exp(-(d-i) t); decreasing, root at t = ln radius
    let g = |t: f64| {
        let terms = logs.iter().map(|&(i, l)| l - (d - i) as f64 * t);
        let top = terms.clone().fold(f64::NEG_INFINITY, f64::max);
        top + terms.map(|x| (x - top).exp()).sum::<f64>().ln()
    };
    let bound = logs
        .iter()
        .map(|&(i, l)| l / (d - i) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (bound - (d as f64).ln() - 1.0, bound + (d as f64).ln() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    hi.exp()
}

/// Starting points from the upper convex hull of `(i, ln|b_i|)`: one circle per
/// hull edge, radius `(|b_i|/|b_j|)^{1/(j-i)}`, holding `j - i` points. All
/// radii are capped by the Cauchy radius.
fn initial_guesses(b: &[Complex64]) -> Vec<Complex64> {
    let d = b.len() - 1;
    let pts: Vec<(usize, f64)> = b
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let (i1, l1) = hull[hull.len() - 2];
            let (i2, l2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly above the chord
            let cross = (i2 as f64 - i1 as f64) * (p.1 - l1) - (l2 - l1) * (p.0 as f64 - i1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let cap = cauchy_radius(b);
    let mut z = Vec::with_capacity(d);
    for w in hull.windows(2) {
        let ((i, li), (j, lj)) = (w[0], w[1]);
        let m = j - i;
        let radius = ((li - lj) / m as f64).exp().min(cap);
        for k in 0..m {
            let angle = TAU * k as f64 / m as f64 + START_ANGLE + i as f64;
            z.push(Complex64::from_polar(radius, angle));
        }
    }
    z
}

/// All roots of a monic polynomial (ascending coefficients, last one = 1) by
/// Aberth–Ehrlich simultaneous iteration.
///
/// Exact zero roots (vanishing trailing coefficients) are split off first and
/// returned exactly. Starting values come from the Newton polygon of the
/// coefficient moduli, each circle rotated by a fixed offset.
pub fn aberth_roots(coeffs: &[Complex64], tol: f64, max_iter: usize) -> Result<Roots> {
    if coeffs.len() < 2 {
        return Err(Error::invalid("coeffs", "degree must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    if *coeffs.last().unwrap() != ONE {
        return Err(Error::invalid("coeffs", "polynomial must be monic"));
    }
    let zeros = coeffs.iter().take_while(|c| **c == ZERO).count();
    let b = &coeffs[zeros..];
    let d = b.len() - 1;
    let mut roots = vec![ZERO; zeros];
    if d == 0 {
        return Ok(Roots {
            roots,
            iterations: 0,
            residual_bound: 0.0,
        });
    }
    if d == 1 {
        roots.push(-b[0]);
        return Ok(Roots {
            roots,
            iterations: 0,
            residual_bound: 0.0,
        });
    }

    let mut z = initial_guesses(b);
    let mut done = vec![false; d];
    let sqrt_tol = tol.sqrt();
    let mut iterations = 0;

    loop {
        if iterations >= max_iter {
            let worst = z.iter().map(|&r| backward_error(b, r)).fold(0.0, f64::max);
            return Err(Error::RootsNoConvergence {
                iterations,
                worst_residual: worst,
            });
        }
        iterations += 1;
        let mut max_corr: f64 = 0.0;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let ratio = newton_ratio(b, zi);
            let corr = if ratio == ZERO {
                ZERO
            } else {
                let mut sum = ZERO;
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        let diff = zi - zj;
                        sum += diff.conj() / diff.norm_sqr();
                    }
                }
                ratio / (ONE - ratio * sum)
            };
            if !(corr.re.is_finite() && corr.im.is_finite()) {
                // coincident iterates: nudge instead of propagating NaN
                z[i] = zi * Complex64::from_polar(1.0 + sqrt_tol, sqrt_tol);
                max_corr = f64::INFINITY;
                continue;
            }
            z[i] = zi - corr;
            let c = corr.norm();
            if c <= tol * z[i].norm().max(1.0) {
                done[i] = true;
            }
            max_corr = max_corr.max(c);
        }
        if done.iter().all(|&x| x) {
            break;
        }
        // clustered roots converge only linearly; accept once stalled and small
        if max_corr < sqrt_tol
            && z.iter()
                .zip(&done)
                .all(|(&r, &ok)| ok || backward_error(b, r) <= tol)
        {
            break;
        }
    }

    let residual_bound = z.iter().map(|&r| backward_error(b, r)).fold(0.0, f64::max);
    roots.extend(z);
    Ok(Roots {
        roots,
        iterations,
        residual_bound,
    })
}

/// Solves `q(z) = 0` for a draw, including the exact zero root when `1/mu = 0`.
pub fn solve_kac(draw: &KacDraw, opts: AberthOptions) -> Result<RootSet> {
    let monic = to_monic_coefficients(draw)?;
    let roots = aberth_roots(&monic, opts.tol, opts.max_iter)?;
    Ok(RootSet {
        roots: roots.roots,
        residual_bound: roots.residual_bound,
        draw: draw.clone(),
    })
}

/// Zeros strictly inside the unit disk.
pub fn roots_in_disk(rs: &RootSet) -> Vec<Complex64> {
    rs.roots
        .iter()
        .copied()
        .filter(|z| z.norm() < 1.0)
        .collect()
}

/// Frobenius companion matrix of a monic polynomial (ascending coefficients).
pub fn companion_matrix(monic: &[Complex64]) -> Result<CMatrix> {
    let d = monic
        .len()
        .checked_sub(1)
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::invalid("coeffs", "degree must be at least 1"))?;
    Ok(CMatrix::from_fn(d, |i, j| {
        if i == 0 {
            -monic[d - 1 - j]
        } else if j + 1 == i {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Roots as companion-matrix eigenvalues; the independent check on Aberth.
pub fn companion_roots(monic: &[Complex64]) -> Result<Vec<Complex64>> {
    eigenvalues_default(&companion_matrix(monic)?)
}

/// Greedy nearest-neighbour pairing; returns the largest paired distance.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, dist) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| {
                if v.1 < acc.1 {
                    v
                } else {
                    acc
                }
            });
        used[k] = true;
        worst = worst.max(dist);
    }
    worst
}
