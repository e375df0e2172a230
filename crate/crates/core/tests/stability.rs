use approx::assert_abs_diff_eq;
use caledonia::equilibrium::{solve, Body, Family};
use caledonia::stability::{
    analyze, characteristic_roots, collinear_pair_roots, hessian_at, square_fixture, square_fixture_literal,
    triangle_fixture, PotentialHessian, Verdict,
};
use caledonia::Vec2;
use num_complex::Complex64;
use proptest::prelude::*;

fn omega(p: Vec2, masses: &[Body]) -> f64 {
    0.5 * p.norm2() + masses.iter().map(|m| m.mass / (p - m.pos).norm()).sum::<f64>()
}

fn quartic(h: &PotentialHessian, l: Complex64) -> Complex64 {
    let l2 = l * l;
    l2 * l2 + l2 * (4.0 - h.uxx - h.uyy) + (h.uxx * h.uyy - h.uxy * h.uxy)
}

#[test]
fn square_fixture_matches_reference() {
    let s = characteristic_roots(&square_fixture(1.3937));
    for l in s.lambdas {
        assert_abs_diff_eq!(l.re.abs(), 0.311628, epsilon = 1e-5);
        assert_abs_diff_eq!(l.im.abs(), 0.996094, epsilon = 1e-5);
    }
    assert_eq!(s.verdict, Verdict::Unstable);
}

#[test]
fn literal_square_fixture_has_real_pair() {
    let s = characteristic_roots(&square_fixture_literal(1.3937));
    assert!(s.lambdas.iter().any(|l| l.im.abs() < 1e-12 && l.re.abs() > 0.1));
}

#[test]
fn triangle_fixture_spectrum() {
    let s = characteristic_roots(&triangle_fixture(2.016));
    let mut re: Vec<f64> = s.lambdas.iter().map(|l| l.re.abs()).collect();
    re.sort_by(f64::total_cmp);
    assert_abs_diff_eq!(re[3], 0.715622, epsilon = 1e-3);
    assert!(s.lambdas.iter().any(|l| (l.im.abs() - 1.8638).abs() < 1e-3));
}

#[test]
fn collinear_pair_regimes() {
    assert_eq!(collinear_pair_roots(1.2).unwrap().verdict, Verdict::Unstable);
    assert_eq!(collinear_pair_roots(0.95).unwrap().verdict, Verdict::Stable);
    assert!(collinear_pair_roots(1.0).unwrap().degenerate);
    assert!(collinear_pair_roots(0.0).is_err());
    // closed form λ² = [(A − 2) ± √(9A² − 8A)]/2
    let a: f64 = 1.7;
    let s = collinear_pair_roots(a).unwrap();
    let l2 = 0.5 * ((a - 2.0) + (9.0 * a * a - 8.0 * a).sqrt());
    assert!(s.lambdas.iter().any(|l| ((l * l).re - l2).abs() < 1e-12));
}

#[test]
fn symmetric_families_are_unstable() {
    for fam in [Family::Square, Family::TriangleEqual, Family::CollinearEqual] {
        let s = &solve(fam, 1.0).unwrap()[0];
        let sp = analyze(s, s.default_test_body()).unwrap();
        assert_eq!(sp.verdict, Verdict::Unstable, "{fam:?}");
        assert!(sp.equilibrium_residual.unwrap() < 1e-8);
    }
}

#[test]
fn diamond_midpoint_spectrum() {
    let s = &solve(Family::Diamond, 0.5).unwrap()[0];
    let sp = analyze(s, s.default_test_body()).unwrap();
    for l in sp.lambdas {
        assert_abs_diff_eq!(l.re.abs(), 0.656, epsilon = 1e-3);
        assert_abs_diff_eq!(l.im.abs(), 0.978, epsilon = 1e-3);
    }
}

#[test]
fn analyze_rejects_bad_body() {
    let s = &solve(Family::Square, 1.0).unwrap()[0];
    assert!(analyze(s, 7).is_err());
}

fn body_strategy() -> impl Strategy<Value = Body> {
    (-2.0f64..2.0, -2.0f64..2.0, 0.1f64..2.0).prop_map(|(x, y, m)| Body { pos: Vec2::new(x, y), mass: m })
}

proptest! {
    #[test]
    fn hessian_matches_finite_differences(
        masses in prop::collection::vec(body_strategy(), 1..4),
        px in -2.0f64..2.0,
        py in -2.0f64..2.0,
    ) {
        let p = Vec2::new(px, py);
        prop_assume!(masses.iter().all(|m| (p - m.pos).norm() > 0.3));
        let h = hessian_at(p, &masses, 1.0).unwrap();
        let e = 1e-4;
        let f = |dx: f64, dy: f64| omega(Vec2::new(px + dx, py + dy), &masses);
        let fxx = (f(e, 0.0) - 2.0 * f(0.0, 0.0) + f(-e, 0.0)) / (e * e);
        let fyy = (f(0.0, e) - 2.0 * f(0.0, 0.0) + f(0.0, -e)) / (e * e);
        let fxy = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4.0 * e * e);
        let tol = 1e-4 * (1.0 + h.uxx.abs() + h.uyy.abs() + h.uxy.abs());
        prop_assert!((h.uxx - fxx).abs() < tol, "uxx {} vs {}", h.uxx, fxx);
        prop_assert!((h.uyy - fyy).abs() < tol, "uyy {} vs {}", h.uyy, fyy);
        prop_assert!((h.uxy - fxy).abs() < tol, "uxy {} vs {}", h.uxy, fxy);
        // the 3 m (dx² + dy²)/r⁵ sums add up to 3 Σ m/r³
        prop_assert!((h.b_ + h.d_ - 3.0 * h.a_).abs() < 1e-9 * h.a_.max(1.0));
    }

    #[test]
    fn roots_solve_the_quartic(uxx in -5.0f64..5.0, uyy in -5.0f64..5.0, uxy in -3.0f64..3.0) {
        let h = PotentialHessian::from_u(uxx, uyy, uxy);
        let s = characteristic_roots(&h);
        let scale = 1.0 + uxx.abs() + uyy.abs() + uxy.abs();
        for l in s.lambdas {
            prop_assert!(quartic(&h, l).norm() < 1e-8 * scale * scale);
        }
        // Vieta on λ²: product is q, sum is −p
        let l2a = s.lambdas[0] * s.lambdas[0];
        let l2b = s.lambdas[2] * s.lambdas[2];
        let q = uxx * uyy - uxy * uxy;
        prop_assert!(((l2a * l2b).re - q).abs() < 1e-9 * scale * scale);
        prop_assert!(((l2a + l2b).re + 4.0 - uxx - uyy).abs() < 1e-9 * scale);
        // spectrum is symmetric under λ → −λ
        prop_assert!((s.lambdas[0] + s.lambdas[1]).norm() == 0.0);
    }
}

#[test]
fn collinear_equal_has_one_real_pair() {
    // one real and one imaginary pair, not two real pairs
    let s = &solve(Family::CollinearEqual, 1.0).unwrap()[0];
    let sp = analyze(s, s.default_test_body()).unwrap();
    let real: Vec<f64> = sp.lambdas.iter().filter(|l| l.im.abs() < 1e-12).map(|l| l.re.abs()).collect();
    assert_eq!(real.len(), 2);
    assert_abs_diff_eq!(real[0], 0.787665844, epsilon = 1e-8);
    assert!(sp.lambdas.iter().any(|l| (l.im.abs() - 1.17294107).abs() < 1e-8));
}
