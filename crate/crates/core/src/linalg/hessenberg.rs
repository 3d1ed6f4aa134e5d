use num_complex::Complex64;

use super::{norm2, CMatrix, ONE, ZERO};

/// Unitary similarity to upper Hessenberg form by Householder reflections.
///
/// The reflections act on coordinates `1..n`, so `e_1` is left fixed. Only the
/// reduced matrix is kept; the transformation itself is discarded.
pub fn reduce_to_hessenberg(h: &mut CMatrix) {
    let n = h.n();
    if n < 3 {
        return;
    }
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail_norm = norm2(&v[1..]);
        if tail_norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let norm = x0.norm().hypot(tail_norm);
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        v[0] = x0 - alpha;
        let tau = 1.0 / (norm * (norm + x0.norm()));
        let base = k + 1;

        // left: rows base..n, columns k+1..n (column k is set explicitly)
        let w = &mut w[k + 1..n];
        w.iter_mut().for_each(|x| *x = ZERO);
        for (offset, vi) in v.iter().enumerate() {
            let vc = vi.conj();
            for (wj, &hij) in w.iter_mut().zip(&h.row(base + offset)[k + 1..n]) {
                *wj += vc * hij;
            }
        }
        for (offset, &vi) in v.iter().enumerate() {
            let s = vi * tau;
            for (hij, &wj) in h.row_mut(base + offset)[k + 1..n].iter_mut().zip(w.iter()) {
                *hij -= s * wj;
            }
        }
        h[(base, k)] = alpha;
        for i in base + 1..n {
            h[(i, k)] = ZERO;
        }

        // right: all rows, columns base..n
        for i in 0..n {
            let row = &mut h.row_mut(i)[base..n];
            let dot: Complex64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            let s = dot * tau;
            for (hij, vj) in row.iter_mut().zip(&v) {
                *hij -= s * vj.conj();
            }
        }
    }
}
