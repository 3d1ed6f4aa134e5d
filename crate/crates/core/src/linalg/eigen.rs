use num_complex::Complex64;

use super::{reduce_to_hessenberg, CMatrix, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Relative deflation threshold for subdiagonal entries.
    pub tol: f64,
    /// Budget of QR sweeps for the whole matrix.
    pub max_iter: usize,
    pub balance: bool,
}

impl EigenOptions {
    pub fn for_dim(n: usize) -> Self {
        Self {
            tol: f64::EPSILON,
            max_iter: 30 * n.max(1),
            balance: true,
        }
    }
}

/// All eigenvalues of a general complex matrix, with multiplicity.
///
/// Balancing, Householder reduction to Hessenberg form, then single-shift
/// complex QR with Wilkinson shifts and deflation. Only the active window is
/// updated since no Schur vectors are wanted. Returns an error rather than a
/// partial spectrum when the sweep budget runs out.
pub fn eigenvalues(m: &CMatrix, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    eigenvalues_with(
        m,
        EigenOptions {
            tol,
            max_iter,
            balance: true,
        },
    )
}

pub fn eigenvalues_default(m: &CMatrix) -> Result<Vec<Complex64>> {
    eigenvalues_with(m, EigenOptions::for_dim(m.n()))
}

pub(crate) fn eigenvalues_with(m: &CMatrix, opts: EigenOptions) -> Result<Vec<Complex64>> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let mut h = m.clone();
    if opts.balance {
        balance(&mut h);
    }
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h, opts)
}

/// Diagonal similarity by powers of two that equalises row and column norms.
fn balance(a: &mut CMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.n();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].l1_norm();
                    r += a[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for x in a.row_mut(i) {
                    *x *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Both eigenvalues of `[[a, b], [c, d]]`, the one nearer `d` second.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let q = if (p.conj() * disc).re >= 0.0 {
        p + disc
    } else {
        p - disc
    };
    if q == ZERO {
        return (d, d);
    }
    (d + q, d - bc / q)
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO, x);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay, Complex64::new(ay, 0.0));
    }
    let nu = ax.hypot(ay);
    let phase = x / ax;
    (ax / nu, phase * y.conj() / nu, phase * nu)
}

fn hessenberg_qr(h: &mut CMatrix, opts: EigenOptions) -> Result<Vec<Complex64>> {
    let n = h.n();
    let mut eigs = Vec::with_capacity(n);
    let norm_estimate = h.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n as isize - 1;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;

    while hi >= 0 {
        let hu = hi as usize;
        if hu == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // locate the start of the unreduced block ending at `hu`
        let mut lo = hu;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = norm_estimate;
            }
            if sub <= opts.tol * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hu {
            eigs.push(h[(hu, hu)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if lo + 1 == hu {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hu)], h[(hu, lo)], h[(hu, hu)]);
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            since_deflation = 0;
            continue;
        }
        if sweeps >= opts.max_iter {
            return Err(Error::EigenNoConvergence {
                iterations: sweeps,
                unconverged: hu + 1,
            });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hu, hu)] + h[(hu, hu - 1)].norm() * 0.75
        } else {
            eig2(
                h[(hu - 1, hu - 1)],
                h[(hu - 1, hu)],
                h[(hu, hu - 1)],
                h[(hu, hu)],
            )
            .1
        };

        qr_sweep(h, lo, hu, shift);
    }
    Ok(eigs)
}

/// One implicit single-shift QR sweep on the window `lo..=hi`.
fn qr_sweep(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.n();
    let mut x = h[(lo, lo)] - shift;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        if k > lo {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
        }
        let (c, s, r) = givens(x, y);
        if k > lo {
            h[(k, k - 1)] = r;
            h[(k + 1, k - 1)] = ZERO;
        }
        let sc = s.conj();
        {
            let data = h.as_mut_slice();
            let (top, bottom) = data.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n + k..k * n + hi + 1];
            let row_k1 = &mut bottom[k..hi + 1];
            for (a, b) in row_k.iter_mut().zip(row_k1.iter_mut()) {
                let (va, vb) = (*a, *b);
                *a = va * c + s * vb;
                *b = vb * c - sc * va;
            }
        }
        let last = (k + 2).min(hi);
        for i in lo..=last {
            let va = h[(i, k)];
            let vb = h[(i, k + 1)];
            h[(i, k)] = va * c + sc * vb;
            h[(i, k + 1)] = vb * c - s * va;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn diagonal() {
        let m = CMatrix::from_diag(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
        let e = sorted(eigenvalues_default(&m).unwrap());
        assert!((e[0] - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        assert!((e[1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn swap_matrix() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = sorted(eigenvalues_default(&m).unwrap());
        assert!((e[0] + 1.0).norm() < 1e-14);
        assert!((e[1] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_and_triangular() {
        let m = CMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]])
            .unwrap();
        for e in eigenvalues_default(&m).unwrap() {
            assert!((e - 2.0).norm() < 1e-4);
        }
    }

    #[test]
    fn companion_of_cubic() {
        // z^3 - 6z^2 + 11z - 6 = (z-1)(z-2)(z-3)
        let m = CMatrix::from_real_rows(&[&[6.0, -11.0, 6.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])
            .unwrap();
        let e = sorted(eigenvalues_default(&m).unwrap());
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).norm() < 1e-12, "{got}");
        }
    }

    #[test]
    fn ginibre_trace_identity() {
        let mut rng = RngStream::new(77, 0);
        let n = 100;
        let m = CMatrix::from_fn(n, |_, _| rng.standard_complex_gaussian());
        let e = eigenvalues(&m, f64::EPSILON, 30 * n).unwrap();
        assert_eq!(e.len(), n);
        let sum: Complex64 = e.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-9 * n as f64 * m.max_abs());
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let mut rng = RngStream::new(1, 0);
        let m = CMatrix::from_fn(20, |_, _| rng.standard_complex_gaussian());
        assert!(matches!(
            eigenvalues(&m, f64::EPSILON, 1),
            Err(Error::EigenNoConvergence { .. })
        ));
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(eigenvalues(&CMatrix::identity(2), 0.0, 10).is_err());
    }
}
