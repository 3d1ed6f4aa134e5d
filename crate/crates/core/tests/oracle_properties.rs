use std::f64::consts::TAU;

use kacmat::mu::Mu;
use kacmat::oracles::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn disk_point(rmin: f64, rmax: f64) -> impl Strategy<Value = Complex64> {
    (rmin..rmax, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn finite_mu() -> impl Strategy<Value = Mu> {
    (0.4f64..4.0, 0.0..TAU).prop_map(|(m, t)| Mu::Finite(Complex64::from_polar(m, t)))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || a == b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_invariance(
        pts in prop::collection::vec(disk_point(0.05, 0.9), 1..=4),
        mu in finite_mu(),
        phi in 0.0..TAU,
    ) {
        let ctx = OracleContext::new(mu).unwrap();
        let rot = Complex64::from_polar(1.0, phi);
        let turned: Vec<Complex64> = pts.iter().map(|z| z * rot).collect();
        let a = rhok_limit(&pts, &ctx).unwrap();
        let b = rhok_limit(&turned, &ctx).unwrap();
        prop_assert!(close(a, b, 1e-12) || (a - b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn conjugation_invariance(
        pts in prop::collection::vec(disk_point(0.05, 0.9), 1..=4),
        mu in finite_mu(),
    ) {
        let ctx = OracleContext::new(mu).unwrap();
        let conj: Vec<Complex64> = pts.iter().map(|z| z.conj()).collect();
        let a = rhok_limit(&pts, &ctx).unwrap();
        let b = rhok_limit(&conj, &ctx).unwrap();
        prop_assert!(close(a, b, 1e-12) || (a - b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn correlations_are_nonnegative(
        pts in prop::collection::vec(disk_point(0.0, 0.95), 1..=5),
        mu in finite_mu(),
    ) {
        for ctx in [OracleContext::new(mu).unwrap(), OracleContext::infinite()] {
            let v = rhok_limit(&pts, &ctx).unwrap();
            prop_assert!(v >= -1e-12, "{v}");
        }
        let ctx = OracleContext::new(mu).unwrap();
        let (z, w) = (pts[0], *pts.last().unwrap());
        prop_assert!(rho2_limit(z, w, &ctx).unwrap() >= -1e-12);
        prop_assert!(rho2_direct(z, w, &ctx).unwrap() >= -1e-12);
        prop_assert!(density_limit(z, &ctx).unwrap().value >= 0.0);
    }

    #[test]
    fn mu_phase_does_not_matter(z in disk_point(0.05, 0.9), w in disk_point(0.05, 0.9), m in 0.4f64..4.0, t in 0.0..TAU) {
        let a = OracleContext::new(Mu::real(m)).unwrap();
        let b = OracleContext::new(Mu::Finite(Complex64::from_polar(m, t))).unwrap();
        // |mu|^2 from the polar form may differ by one ulp
        prop_assert!(close(rho2_limit(z, w, &a).unwrap(), rho2_limit(z, w, &b).unwrap(), 1e-10));
        prop_assert!(close(rhok_limit(&[z, w], &a).unwrap(), rhok_limit(&[z, w], &b).unwrap(), 1e-10));
        let ka = rho2_kacrice(z, w, &a).unwrap();
        let kb = rho2_kacrice(z, w, &b).unwrap();
        prop_assert!(close(ka, kb, 1e-9) || (ka - kb).abs() < 1e-300);
    }

    #[test]
    fn large_mu_matches_determinantal(
        pts in prop::collection::vec(disk_point(0.05, 0.9), 1..=4),
    ) {
        let big = OracleContext::new(Mu::real(1e8)).unwrap();
        let inf = OracleContext::infinite();
        let det = rhok_determinantal(&pts).unwrap();
        prop_assert!(close(rhok_limit(&pts, &big).unwrap(), det, 1e-6));
        prop_assert!(close(rhok_limit(&pts, &inf).unwrap(), det, 1e-10));
        let z = pts[0];
        let d = density_limit(z, &inf).unwrap().value;
        prop_assert!(close(density_limit(z, &big).unwrap().value, d, 1e-6));
        prop_assert!(close(rho1_kacrice(z, &big).unwrap(), d, 1e-6));
        if pts.len() >= 2 {
            let w = pts[1];
            let r = rho2_limit(z, w, &inf).unwrap();
            prop_assert!(close(rho2_limit(z, w, &big).unwrap(), r, 1e-6));
            prop_assert!(close(rho2_direct(z, w, &big).unwrap(), r, 1e-6));
            let t = truncated_correlation(&[z, w], &inf).unwrap();
            prop_assert!(close(truncated_correlation(&[z, w], &big).unwrap(), t, 1e-6));
        }
    }

    #[test]
    fn pencil_interpolation_matches_row_expansion(pts in prop::collection::vec(disk_point(0.0, 0.9), 1..=5)) {
        let a = q_coefficients(&pts).unwrap();
        let b = q_coefficients_row_expansion(&pts).unwrap();
        // Hadamard bound of the pencil rows: the natural error scale of a determinant
        let pencil = SPencil::new(&pts).unwrap();
        let k = pts.len();
        let row = |m: &kacmat::linalg::CMatrix, i: usize| {
            (0..k).map(|j| m[(i, j)].norm_sqr()).sum::<f64>().sqrt()
        };
        let scale: f64 = (0..k).map(|i| row(&pencil.f, i) + row(&pencil.g, i)).product();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * scale, "{a:?} {b:?}");
        }
    }

    #[test]
    fn two_point_routes_agree(z in disk_point(0.05, 0.95), w in disk_point(0.05, 0.95), mu in finite_mu()) {
        let ctx = OracleContext::new(mu).unwrap();
        let l = rho2_limit(z, w, &ctx).unwrap();
        prop_assert!(close(rho2_direct(z, w, &ctx).unwrap(), l, 1e-10));
        prop_assert!(close(rho2_direct(w, z, &ctx).unwrap(), l, 1e-10));
        prop_assert!(close(rhok_limit(&[z, w], &ctx).unwrap(), l, 1e-10));
        let d = density_limit(z, &ctx).unwrap().value;
        prop_assert!(close(rho1_kacrice(z, &ctx).unwrap(), d, 1e-12));
        prop_assert!(close(rhok_limit(&[z], &ctx).unwrap(), d, 1e-12));
    }

    #[test]
    fn diagonal_vanishes(z in disk_point(0.05, 0.95), mu in finite_mu()) {
        let ctx = OracleContext::new(mu).unwrap();
        prop_assert_eq!(rho2_direct(z, z, &ctx).unwrap(), 0.0);
        let d = density_limit(z, &ctx).unwrap().value;
        prop_assert!(rho2_limit(z, z, &ctx).unwrap().abs() <= 1e-10 * d * d + 1e-300);
    }

    #[test]
    fn determinantal_cluster_factorisation(r in 0.9f64..0.97, t in 0.0..TAU, dt in -0.2f64..0.2) {
        let inf = OracleContext::infinite();
        let z = Complex64::from_polar(r, t);
        let w = Complex64::from_polar(r, t + std::f64::consts::PI + dt);
        let r1 = density_limit(z, &inf).unwrap().value * density_limit(w, &inf).unwrap().value;
        let r2 = rho2_limit(z, w, &inf).unwrap();
        let k2 = kernel_k(z, w).unwrap().norm_sqr();
        prop_assert!((r1 - r2 - k2).abs() < 1e-12 * r1);
        prop_assert!((r2 / r1 - 1.0).abs() < 1e-3);
    }
}

#[test]
fn kacrice_two_point_cross_check() {
    let ctx = OracleContext::new(Mu::Finite(Complex64::new(0.6, -0.9))).unwrap();
    for (z, w) in [
        (Complex64::new(0.4, 0.3), Complex64::new(-0.5, 0.45)),
        (Complex64::new(0.7, 0.0), Complex64::new(0.0, -0.6)),
        (Complex64::new(-0.3, -0.6), Complex64::new(0.65, 0.2)),
    ] {
        let kr = rho2_kacrice(z, w, &ctx).unwrap();
        let l = rho2_limit(z, w, &ctx).unwrap();
        assert!(close(kr, l, 1e-7), "{kr} {l}");
        let blk = CovarianceBlocks::limit(&[z, w]).unwrap();
        assert!(blk.determinant_identity_defect() < 1e-9);
    }
}

#[test]
fn truncated_three_point_in_determinantal_case() {
    // cycle form: rho3^T = 2 Re K12 K23 K31
    let inf = OracleContext::infinite();
    let p = [
        Complex64::new(0.2, 0.1),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.1, -0.5),
    ];
    let k = |i: usize, j: usize| kernel_k(p[i], p[j]).unwrap();
    let want = 2.0 * (k(0, 1) * k(1, 2) * k(2, 0)).re;
    let got = truncated_correlation(&p, &inf).unwrap();
    assert!(
        (got - want).abs() < 1e-12 * want.abs().max(1.0),
        "{got} {want}"
    );
}
