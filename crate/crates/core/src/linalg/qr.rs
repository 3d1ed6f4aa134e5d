use num_complex::Complex64;

use super::{norm2, CMatrix, LinearOperator, ONE, ZERO};
use crate::error::{Error, Result};

/// Pivots below this magnitude are treated as exact rank deficiency.
pub const RANK_DEFICIENCY_THRESHOLD: f64 = 1e-300;

/// Householder QR kept in factored form.
///
/// `Q = H_0 H_1 ... H_{n-1} D` where `H_k = I - tau_k v_k v_k^†` acts on rows
/// `k..n` and `D` is the diagonal phase matrix that makes the diagonal of `R`
/// real and strictly positive. With that normalisation the `Q` factor of a
/// Ginibre matrix is Haar distributed.
#[derive(Debug, Clone)]
pub struct HouseholderQr {
    n: usize,
    reflectors: Vec<Vec<Complex64>>,
    taus: Vec<f64>,
    phases: Vec<Complex64>,
    r: CMatrix,
}

impl HouseholderQr {
    pub fn new(m: &CMatrix) -> Result<Self> {
        Self::factor(m.clone())
    }

    /// Factors in place, consuming the input buffer.
    pub fn factor(mut a: CMatrix) -> Result<Self> {
        let n = a.n();
        let mut reflectors = Vec::with_capacity(n);
        let mut taus = Vec::with_capacity(n);
        let mut w = vec![ZERO; n];

        for k in 0..n {
            let mut v: Vec<Complex64> = (k..n).map(|i| a[(i, k)]).collect();
            let tail_norm = norm2(&v[1..]);
            let x0 = v[0];
            if tail_norm == 0.0 {
                // already upper triangular in this column
                reflectors.push(Vec::new());
                taus.push(0.0);
                continue;
            }
            let norm = x0.norm().hypot(tail_norm);
            let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
            let alpha = -phase * norm;
            v[0] = x0 - alpha;
            let tau = 1.0 / (norm * (norm + x0.norm()));

            // w_j = v^† A[k.., j] for j > k
            let w = &mut w[k + 1..n];
            w.iter_mut().for_each(|x| *x = ZERO);
            for (offset, vi) in v.iter().enumerate() {
                let vc = vi.conj();
                let row = &a.row(k + offset)[k + 1..n];
                for (wj, &aij) in w.iter_mut().zip(row) {
                    *wj += vc * aij;
                }
            }
            for (offset, &vi) in v.iter().enumerate() {
                let s = vi * tau;
                let row = &mut a.row_mut(k + offset)[k + 1..n];
                for (aij, &wj) in row.iter_mut().zip(w.iter()) {
                    *aij -= s * wj;
                }
            }
            a[(k, k)] = alpha;
            for i in k + 1..n {
                a[(i, k)] = ZERO;
            }
            reflectors.push(v);
            taus.push(tau);
        }

        let mut phases = Vec::with_capacity(n);
        for k in 0..n {
            let d = a[(k, k)];
            let magnitude = d.norm();
            if magnitude < RANK_DEFICIENCY_THRESHOLD {
                return Err(Error::RankDeficient {
                    index: k,
                    magnitude,
                });
            }
            let p = d / magnitude;
            phases.push(p);
            // R <- D^{-1} R
            let pc = p.conj();
            for x in &mut a.row_mut(k)[k..] {
                *x *= pc;
            }
            a[(k, k)] = Complex64::new(magnitude, 0.0);
        }

        Ok(Self {
            n,
            reflectors,
            taus,
            phases,
            r: a,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    pub fn into_r(self) -> CMatrix {
        self.r
    }

    /// Explicit `Q`.
    pub fn q(&self) -> CMatrix {
        let n = self.n;
        let mut q = CMatrix::identity(n);
        let mut w = vec![ZERO; n];
        // backward accumulation: Q <- H_k Q touches rows/cols k..n only
        for k in (0..n).rev() {
            let v = &self.reflectors[k];
            if v.is_empty() {
                continue;
            }
            let tau = self.taus[k];
            let w = &mut w[k..n];
            w.iter_mut().for_each(|x| *x = ZERO);
            for (offset, vi) in v.iter().enumerate() {
                let vc = vi.conj();
                for (wj, &qij) in w.iter_mut().zip(&q.row(k + offset)[k..n]) {
                    *wj += vc * qij;
                }
            }
            for (offset, &vi) in v.iter().enumerate() {
                let s = vi * tau;
                for (qij, &wj) in q.row_mut(k + offset)[k..n].iter_mut().zip(w.iter()) {
                    *qij -= s * wj;
                }
            }
        }
        for i in 0..n {
            for (qij, &p) in q.row_mut(i).iter_mut().zip(&self.phases) {
                *qij *= p;
            }
        }
        q
    }

    fn reflect(&self, k: usize, y: &mut [Complex64]) {
        let v = &self.reflectors[k];
        if v.is_empty() {
            return;
        }
        let seg = &mut y[k..];
        let dot: Complex64 = v.iter().zip(seg.iter()).map(|(a, b)| a.conj() * b).sum();
        let s = dot * self.taus[k];
        for (yi, &vi) in seg.iter_mut().zip(v) {
            *yi -= vi * s;
        }
    }

    /// `Q x` without forming `Q`; O(n^2).
    pub fn apply_q(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = x.iter().zip(&self.phases).map(|(a, p)| a * p).collect();
        for k in (0..self.n).rev() {
            self.reflect(k, &mut y);
        }
        y
    }

    /// `Q^† x` without forming `Q`.
    pub fn apply_q_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = x.to_vec();
        for k in 0..self.n {
            self.reflect(k, &mut y);
        }
        for (yi, p) in y.iter_mut().zip(&self.phases) {
            *yi *= p.conj();
        }
        y
    }
}

/// The unitary factor acts as an operator without being materialised.
impl LinearOperator for HouseholderQr {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_q(x)
    }
}

/// `M = QR` with `Q` unitary and `R` upper triangular with positive real diagonal.
pub fn qr_phase_normalized(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let f = HouseholderQr::new(m)?;
    let q = f.q();
    Ok((q, f.into_r()))
}
