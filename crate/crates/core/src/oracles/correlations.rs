//! k-point correlation functions in the infinite-degree limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_in_disk, damped, one_minus, OracleContext};
use crate::error::{Error, Result};
use crate::linalg::{determinant, CMatrix, Lu};

/// Largest `k` accepted by [`rhok_limit`].
pub const MAX_K: usize = 8;
/// Largest order accepted by [`truncated_correlation`].
pub const MAX_TRUNCATED_K: usize = 4;

/// The pencil `s F + G` with `F_ij = 1/(1-x)`, `G_ij = x/(1-x)^2`,
/// `x = z_i conj(z_j)`.
#[derive(Debug, Clone)]
pub struct SPencil {
    pub f: CMatrix,
    pub g: CMatrix,
}

impl SPencil {
    pub fn new(points: &[Complex64]) -> Result<Self> {
        let k = points.len();
        if k == 0 {
            return Err(Error::invalid("points", "need at least one point"));
        }
        for &z in points {
            check_in_disk(z)?;
        }
        let mut d = Vec::with_capacity(k * k);
        for &zi in points {
            for &zj in points {
                d.push(one_minus(zi, zj)?);
            }
        }
        let one = Complex64::new(1.0, 0.0);
        Ok(Self {
            f: CMatrix::from_fn(k, |i, j| d[i * k + j].inv()),
            g: CMatrix::from_fn(k, |i, j| {
                let dij = d[i * k + j];
                (one - dij) / (dij * dij)
            }),
        })
    }

    pub fn k(&self) -> usize {
        self.f.n()
    }

    /// `det(s F + G)`.
    pub fn det_at(&self, s: f64) -> Complex64 {
        let k = self.k();
        determinant(&CMatrix::from_fn(k, |i, j| {
            self.f[(i, j)] * s + self.g[(i, j)]
        }))
    }
}

/// Coefficients `Q_0..Q_k` of `det(s F + G)`, by evaluation at
/// `s = 0, 1, ..., k` and a Vandermonde solve.
pub fn q_coefficients(points: &[Complex64]) -> Result<Vec<f64>> {
    let pencil = SPencil::new(points)?;
    let k = pencil.k();
    let values: Vec<Complex64> = (0..=k).map(|s| pencil.det_at(s as f64)).collect();
    let v = CMatrix::from_fn(k + 1, |i, j| Complex64::new((i as f64).powi(j as i32), 0.0));
    let q = Lu::new(&v)?.solve(&values)?;
    Ok(q.into_iter().map(|c| c.re).collect())
}

/// Same coefficients by multilinear expansion over rows: `2^k` determinants.
pub fn q_coefficients_row_expansion(points: &[Complex64]) -> Result<Vec<f64>> {
    let pencil = SPencil::new(points)?;
    let k = pencil.k();
    let mut q = vec![0.0; k + 1];
    for mask in 0u32..(1 << k) {
        let m = CMatrix::from_fn(k, |i, j| {
            if mask >> i & 1 == 1 {
                pencil.f[(i, j)]
            } else {
                pencil.g[(i, j)]
            }
        });
        q[mask.count_ones() as usize] += determinant(&m).re;
    }
    Ok(q)
}

/// `P(u) exp(-c u)` with `u = 1/x`; `coeffs[j]` multiplies `u^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentExpPoly {
    pub c: f64,
    pub coeffs: Vec<f64>,
}

impl LaurentExpPoly {
    /// `(1/x) exp(-c/x)`.
    pub fn base(c: f64) -> Self {
        Self {
            c,
            coeffs: vec![0.0, 1.0],
        }
    }

    pub fn poly_at(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &p| acc * u + p)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let u = 1.0 / x;
        self.poly_at(u) * (-self.c * u).exp()
    }
}

/// `(d/dx) (x f)`: `P -> P - u P' + c u P`.
pub fn apply_ddx_x(f: &LaurentExpPoly) -> LaurentExpPoly {
    let mut out = vec![0.0; f.coeffs.len() + 1];
    for (j, &p) in f.coeffs.iter().enumerate() {
        out[j] += (1.0 - j as f64) * p;
        out[j + 1] += f.c * p;
    }
    while out.len() > 1 && *out.last().unwrap() == 0.0 {
        out.pop();
    }
    LaurentExpPoly {
        c: f.c,
        coeffs: out,
    }
}

/// `rho_k` in the infinite-degree limit at `k <= 8` points.
pub fn rhok_limit(points: &[Complex64], ctx: &OracleContext) -> Result<f64> {
    let k = points.len();
    if k == 0 || k > MAX_K {
        return Err(Error::invalid("points", format!("need 1..={MAX_K} points")));
    }
    if ctx.c == 0.0 {
        return determinant_part(points);
    }
    let q = q_coefficients(points)?;
    let x: f64 = points.iter().map(|z| z.norm_sqr()).product();
    if x == 0.0 {
        return Ok(0.0);
    }
    let u = 1.0 / x;
    let mut p = LaurentExpPoly::base(ctx.c);
    let mut sum = 0.0;
    for ql in q {
        sum += ql * p.poly_at(u);
        p = apply_ddx_x(&p);
    }
    Ok(damped(ctx.c, x, sum / PI.powi(k as i32)))
}

/// `det[1/(1 - z_i conj(z_j))^2] / pi^k`, the `c = 0` value of [`rhok_limit`].
fn determinant_part(points: &[Complex64]) -> Result<f64> {
    let k = points.len();
    for &z in points {
        check_in_disk(z)?;
    }
    let mut m = CMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            let d = one_minus(points[i], points[j])?;
            m.as_mut_slice()[i * k + j] = (d * d).inv();
        }
    }
    Ok(determinant(&m).re / PI.powi(k as i32))
}

/// `det[K(z_i, z_j)]` assembled from [`super::kernel_k`].
pub fn rhok_determinantal(points: &[Complex64]) -> Result<f64> {
    let k = points.len();
    if k == 0 {
        return Err(Error::invalid("points", "need at least one point"));
    }
    let mut m = CMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            check_in_disk(points[i])?;
            m.as_mut_slice()[i * k + j] = super::kernel_k(points[i], points[j])?;
        }
    }
    Ok(determinant(&m).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointParts {
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
}

struct PairTerms {
    a: f64,
    b: f64,
    x: f64,
    /// `|1 - z conj(w)|^2`
    cross: f64,
    /// `1 - z conj(w)`
    d: Complex64,
    dist2: f64,
}

fn pair_terms(z: Complex64, w: Complex64) -> Result<PairTerms> {
    check_in_disk(z)?;
    check_in_disk(w)?;
    one_minus(z, z)?;
    one_minus(w, w)?;
    let d = one_minus(z, w)?;
    let (a, b) = (z.norm_sqr(), w.norm_sqr());
    Ok(PairTerms {
        a,
        b,
        x: a * b,
        cross: d.norm_sqr(),
        d,
        dist2: (z - w).norm_sqr(),
    })
}

impl PairTerms {
    /// `Y0 / |zw|^2`.
    fn y0_bracket(&self) -> f64 {
        1.0 / ((1.0 - self.a).powi(2) * (1.0 - self.b).powi(2)) - 1.0 / (self.cross * self.cross)
    }

    fn y2(&self) -> f64 {
        self.dist2 / ((1.0 - self.a) * (1.0 - self.b) * self.cross)
    }
}

/// `Y0, Y1, Y2` of the two-point function.
pub fn rho2_parts(z: Complex64, w: Complex64) -> Result<TwoPointParts> {
    let t = pair_terms(z, w)?;
    let (a, b) = (t.a, t.b);
    let wz = w * z.conj();
    let one = Complex64::new(1.0, 0.0);
    let mixed = wz / (one - wz) + wz.conj() / (one - wz.conj());
    let y1 = b / ((1.0 - a) * (1.0 - b).powi(2)) + a / ((1.0 - a).powi(2) * (1.0 - b))
        - mixed.re / t.cross;
    Ok(TwoPointParts {
        y0: t.x * t.y0_bracket(),
        y1,
        y2: t.y2(),
    })
}

/// `rho_2` as the combination `Y0/X + c (Y1 - Y2)/X^2 + c^2 Y2/X^3`,
/// `X = |zw|^2`, times `exp(c(1 - 1/X)) / pi^2`.
pub fn rho2_limit(z: Complex64, w: Complex64, ctx: &OracleContext) -> Result<f64> {
    let parts = rho2_parts(z, w)?;
    let t = pair_terms(z, w)?;
    let c = ctx.c;
    if c == 0.0 {
        return Ok(t.y0_bracket() / (PI * PI));
    }
    let x = t.x;
    if x == 0.0 {
        return Ok(0.0);
    }
    let inner =
        t.y0_bracket() + c * (parts.y1 - parts.y2) / (x * x) + c * c * parts.y2 / (x * x * x);
    Ok(damped(c, x, inner / (PI * PI)))
}

/// `rho_2` from the Kac–Rice closed form with the explicit `|z - w|^2` factor.
pub fn rho2_direct(z: Complex64, w: Complex64, ctx: &OracleContext) -> Result<f64> {
    let t = pair_terms(z, w)?;
    let c = ctx.c;
    let (a, b, x) = (t.a, t.b, t.x);
    let pre = t.dist2 / (t.cross * (1.0 - a) * (1.0 - b)) / (PI * PI);
    let s = 1.0 / ((1.0 - a) * (1.0 - b)) + 1.0 / t.cross;
    if c == 0.0 {
        return Ok(pre * s);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // 1/(w conj(z) (1 - z conj(w))) plus its conjugate
    let m = (w * z.conj() * t.d).inv();
    let t1 = 1.0 / ((1.0 - b) * a) + 1.0 / ((1.0 - a) * b) + 2.0 * m.re;
    Ok(damped(c, x, pre * (c * c / (x * x * x) + c * t1 / x + s)))
}

/// All set partitions of `{0, .., k-1}`, blocks in order of first element.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, k: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, k, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, k, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}

/// Truncated correlation: `sum_G (-1)^{m-1} (m-1)! prod_j rho_{|G_j|}` over set
/// partitions `G` into `m` blocks.
pub fn truncated_correlation(points: &[Complex64], ctx: &OracleContext) -> Result<f64> {
    let k = points.len();
    if k == 0 || k > MAX_TRUNCATED_K {
        return Err(Error::invalid(
            "points",
            format!("need 1..={MAX_TRUNCATED_K} points"),
        ));
    }
    let mut total = 0.0;
    for partition in set_partitions(k) {
        let m = partition.len();
        let weight = if m % 2 == 1 { 1.0 } else { -1.0 } * (1..m).product::<usize>() as f64;
        let mut term = weight;
        for block in &partition {
            let pts: Vec<Complex64> = block.iter().map(|&i| points[i]).collect();
            term *= rhok_limit(&pts, ctx)?;
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu::Mu;
    use crate::oracles::{density_limit, kernel_k};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn q_for_one_point() {
        assert_eq!(q_coefficients(&[c(0.0, 0.0)]).unwrap(), vec![0.0, 1.0]);
        let z = c(0.3, -0.4);
        let x = z.norm_sqr();
        let q = q_coefficients(&[z]).unwrap();
        assert!((q[0] - x / (1.0 - x).powi(2)).abs() < 1e-14);
        assert!((q[1] - 1.0 / (1.0 - x)).abs() < 1e-14);
    }

    #[test]
    fn interpolation_matches_row_expansion() {
        let pts = [
            c(0.1, 0.5),
            c(-0.6, 0.2),
            c(0.3, -0.3),
            c(0.05, 0.7),
            c(-0.2, -0.6),
        ];
        for k in 1..=5 {
            let a = q_coefficients(&pts[..k]).unwrap();
            let b = q_coefficients_row_expansion(&pts[..k]).unwrap();
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10 * scale, "k={k}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn laurent_operator() {
        let c0 = 0.7;
        let p1 = apply_ddx_x(&LaurentExpPoly::base(c0));
        assert_eq!(p1.coeffs, vec![0.0, 0.0, c0]);
        let p2 = apply_ddx_x(&p1);
        assert_eq!(p2.coeffs, vec![0.0, 0.0, -c0, c0 * c0]);
        // compare with a finite difference of d/dx (x f)
        let f = |x: f64| x * p1.evaluate(x);
        let (x, h) = (0.6, 1e-5);
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        assert!((fd - p2.evaluate(x)).abs() < 1e-8);
    }

    #[test]
    fn k1_and_k2_reduce() {
        let ctx = OracleContext::new(Mu::Finite(c(0.8, 0.6))).unwrap();
        let (z, w) = (c(0.4, 0.3), c(-0.5, 0.45));
        let r1 = rhok_limit(&[z], &ctx).unwrap();
        let d = density_limit(z, &ctx).unwrap().value;
        assert!((r1 - d).abs() < 1e-12 * d);
        let r2 = rhok_limit(&[z, w], &ctx).unwrap();
        let l = rho2_limit(z, w, &ctx).unwrap();
        let direct = rho2_direct(z, w, &ctx).unwrap();
        assert!((r2 - l).abs() < 1e-10 * l);
        assert!((direct - l).abs() < 1e-10 * l);
    }

    #[test]
    fn two_point_reference_values() {
        let parts = rho2_parts(c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert!((parts.y2 - 1.0 / 3.0).abs() < 1e-15);
        let z = c(0.3, 0.1);
        let p = rho2_parts(z, z).unwrap();
        assert_eq!(p.y2, 0.0);
        assert!(p.y0.abs() < 1e-15);
        let inf = OracleContext::infinite();
        let v = rho2_limit(c(0.0, 0.0), c(0.5, 0.0), &inf).unwrap();
        assert!((v - 0.078_805_365_055_151_6).abs() < 1e-14, "{v}");
        let v = rho2_direct(c(0.0, 0.0), c(0.5, 0.0), &inf).unwrap();
        assert!((v - 0.078_805_365_055_151_6).abs() < 1e-14, "{v}");
    }

    #[test]
    fn determinantal_limit() {
        let pts = [c(0.1, 0.5), c(-0.6, 0.2), c(0.3, -0.3)];
        let inf = OracleContext::infinite();
        let a = rhok_limit(&pts, &inf).unwrap();
        let b = rhok_determinantal(&pts).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
        let near = OracleContext::new(Mu::real(1e8)).unwrap();
        let n = rhok_limit(&pts, &near).unwrap();
        assert!((n - b).abs() < 1e-6 * b);
    }

    #[test]
    fn partitions_count() {
        let bell: Vec<usize> = (1..=5).map(|k| set_partitions(k).len()).collect();
        assert_eq!(bell, vec![1, 2, 5, 15, 52]);
    }

    #[test]
    fn truncated_two_point() {
        let inf = OracleContext::infinite();
        let (z, w) = (c(0.2, 0.1), c(-0.3, 0.4));
        let t = truncated_correlation(&[z, w], &inf).unwrap();
        let k = kernel_k(z, w).unwrap().norm_sqr();
        assert!((t + k).abs() < 1e-13);
        let ctx = OracleContext::new(Mu::real(1.5)).unwrap();
        let t = truncated_correlation(&[z, z], &ctx).unwrap();
        let r1 = density_limit(z, &ctx).unwrap().value;
        assert!((t + r1 * r1).abs() < 1e-13);
    }
}
