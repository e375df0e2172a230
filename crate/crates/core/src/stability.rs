//! Linear stability of a body at an equilibrium point of the rotating frame.
//!
//! With the rotation rate normalized to n = 1 the effective potential is
//! Ω = (x² + y²)/2 + Σ m_i / r_i and the linearized motion has the
//! characteristic quartic λ⁴ + (4 − Uxx − Uyy) λ² + (Uxx Uyy − Uxy²) = 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::common::Vec2;
use crate::equilibrium::{accelerations, recenter, rotation_rate2, Body, EquilibriumSolution};
use crate::{Error, Result};

/// Default bound on |Re λ| for a spectrum to count as purely imaginary.
pub const CLASSIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialHessian {
    pub uxx: f64,
    pub uyy: f64,
    pub uxy: f64,
    /// Σ m/r³; NaN for fixtures given directly in U terms.
    pub a_: f64,
    pub b_: f64,
    pub c_: f64,
    pub d_: f64,
}

impl PotentialHessian {
    /// A hessian given directly by its second derivatives.
    pub fn from_u(uxx: f64, uyy: f64, uxy: f64) -> Self {
        PotentialHessian { uxx, uyy, uxy, a_: f64::NAN, b_: f64::NAN, c_: f64::NAN, d_: f64::NAN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySpectrum {
    /// ±λa, ±λb
    pub lambdas: [Complex64; 4],
    pub verdict: Verdict,
    pub max_real_part: f64,
    /// Set when λ² = 0 is a root (repeated zero eigenvalue).
    pub degenerate: bool,
    pub hessian: PotentialHessian,
    /// |∇Ω| at the test point when built from a configuration.
    pub equilibrium_residual: Option<f64>,
}

/// Second derivatives of the n = 1 effective potential at `point` due to
/// `masses` rotating at rate `n`.
pub fn hessian_at(point: Vec2, masses: &[Body], n: f64) -> Result<PotentialHessian> {
    if !(n > 0.0) {
        return Err(Error::domain("rotation rate must be positive"));
    }
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for (i, m) in masses.iter().enumerate() {
        let dx = point.x - m.pos.x;
        let dy = point.y - m.pos.y;
        let r2 = dx * dx + dy * dy;
        if r2 == 0.0 {
            return Err(Error::domain(format!("point coincides with mass {i}")));
        }
        let r = r2.sqrt();
        let r3 = r2 * r;
        let r5 = r3 * r2;
        a += m.mass / r3;
        b += 3.0 * m.mass * dy * dy / r5;
        c += 3.0 * m.mass * dx * dy / r5;
        d += 3.0 * m.mass * dx * dx / r5;
    }
    let s = 1.0 / (n * n);
    let (a, b, c, d) = (a * s, b * s, c * s, d * s);
    Ok(PotentialHessian { uxx: 1.0 - a + d, uyy: 1.0 - a + b, uxy: c, a_: a, b_: b, c_: c, d_: d })
}

/// Stable iff every root is purely imaginary within `tol`.
pub fn classify(lambdas: &[Complex64], tol: f64) -> Verdict {
    if lambdas.iter().all(|l| l.re.abs() <= tol) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// Roots of the characteristic quartic via the quadratic in λ².
pub fn characteristic_roots(h: &PotentialHessian) -> StabilitySpectrum {
    let p = 4.0 - h.uxx - h.uyy;
    let q = h.uxx * h.uyy - h.uxy * h.uxy;
    let disc = Complex64::new(p * p - 4.0 * q, 0.0).sqrt();
    let l2a = (-p + disc) * 0.5;
    let l2b = (-p - disc) * 0.5;
    let la = l2a.sqrt();
    let lb = l2b.sqrt();
    let lambdas = [la, -la, lb, -lb];
    let max_real_part = lambdas.iter().map(|l| l.re.abs()).fold(0.0, f64::max);
    let scale = 1.0 + p.abs() + q.abs().sqrt();
    let degenerate = l2a.norm() <= 1e-12 * scale || l2b.norm() <= 1e-12 * scale;
    StabilitySpectrum {
        lambdas,
        verdict: classify(&lambdas, CLASSIFY_TOL),
        max_real_part,
        degenerate,
        hessian: *h,
        equilibrium_residual: None,
    }
}

/// Spectrum for the collinear structure Uxx = 1 + 2A, Uyy = 1 − A,
/// Uxy = 0. The roots are λ² = [(A − 2) ± √(9A² − 8A)]/2, so the spectrum
/// is unstable for A > 1, purely imaginary for 8/9 ≤ A < 1 and degenerate
/// at A = 1.
pub fn collinear_pair_roots(a: f64) -> Result<StabilitySpectrum> {
    if !(a > 0.0) {
        return Err(Error::domain("A must be positive"));
    }
    let h = PotentialHessian { uxx: 1.0 + 2.0 * a, uyy: 1.0 - a, uxy: 0.0, a_: a, b_: 0.0, c_: 0.0, d_: 3.0 * a };
    Ok(characteristic_roots(&h))
}

/// Linear stability of body `test_body` of an equilibrium configuration:
/// lengths are rescaled so that n = 1, then the hessian due to the other
/// three masses is evaluated at the test body.
pub fn analyze(sol: &EquilibriumSolution, test_body: usize) -> Result<StabilitySpectrum> {
    if test_body >= sol.bodies.len() {
        return Err(Error::domain(format!("no body with index {test_body}")));
    }
    let mut bodies: Vec<Body> = sol.bodies.to_vec();
    if bodies.iter().any(|b| !(b.mass > 0.0)) {
        return Err(Error::domain("every body needs a positive mass for the analysis"));
    }
    recenter(&mut bodies);
    let (n2, _) = rotation_rate2(&bodies);
    if !(n2 > 0.0) {
        return Err(Error::domain("configuration does not rotate (n² <= 0)"));
    }
    let s = n2.cbrt();
    for b in bodies.iter_mut() {
        b.pos = b.pos * s;
    }
    let point = bodies[test_body].pos;
    let others: Vec<Body> =
        bodies.iter().enumerate().filter(|(k, _)| *k != test_body).map(|(_, b)| *b).collect();
    let h = hessian_at(point, &others, 1.0)?;
    let grad = point + accelerations(&bodies)[test_body];
    let mut spec = characteristic_roots(&h);
    spec.equilibrium_residual = Some(grad.norm());
    Ok(spec)
}

/// Square-case hessian with the reference numerical coefficients taken
/// literally. It does not reproduce the reference eigenvalues (it yields a
/// real pair); kept to document that discrepancy.
pub fn square_fixture_literal(a: f64) -> PotentialHessian {
    let a3 = a * a * a;
    PotentialHessian::from_u(1.0 + 0.0159 / a3, 0.422 / a3, 1.0 + 0.5519 / a3)
}

/// Square-case hessian equivalent to the reference closed form
/// λ = ±½ √(−4 + 1.136/a³ ± 2√(1.003/a⁶ − 4.544/a³)), written with Uxy = 0.
pub fn square_fixture(a: f64) -> PotentialHessian {
    let a3 = a * a * a;
    let root = 1.003f64.sqrt();
    let u = 0.5 * (0.568 + root);
    let v = 0.5 * (0.568 - root);
    PotentialHessian::from_u(1.0 + u / a3, 1.0 + v / a3, 0.0)
}

/// Reference hessian of the centroid body of the equal-mass triangle.
pub fn triangle_fixture(a: f64) -> PotentialHessian {
    let a2 = a * a;
    let a3 = a2 * a;
    PotentialHessian::from_u(1.0 - 5.84 / a2 - 3.897 / a3, 1.0 + 7.79 / a3, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle() {
        let s = characteristic_roots(&PotentialHessian::from_u(0.0, 0.0, 0.0));
        let mut im: Vec<f64> = s.lambdas.iter().map(|l| l.im.abs()).collect();
        im.sort_by(f64::total_cmp);
        assert!(im[0] < 1e-15 && im[1] < 1e-15);
        assert!((im[2] - 2.0).abs() < 1e-15 && (im[3] - 2.0).abs() < 1e-15);
        assert!(s.degenerate);
    }

    #[test]
    fn classify_boundary() {
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(classify(&[i * 2.0, -i * 2.0, i, -i], CLASSIFY_TOL), Verdict::Stable);
        let e = Complex64::new(1e-12, 0.0);
        assert_eq!(classify(&[e, -e, i, -i], CLASSIFY_TOL), Verdict::Stable);
        let z = Complex64::new(0.3, 0.9);
        assert_eq!(classify(&[z, -z, z.conj(), -z.conj()], CLASSIFY_TOL), Verdict::Unstable);
    }

    #[test]
    fn axis_offset_single_mass() {
        let m = [Body { pos: Vec2::new(2.0, 0.0), mass: 0.5 }];
        let h = hessian_at(Vec2::ZERO, &m, 1.0).unwrap();
        assert_eq!(h.b_, 0.0);
        assert_eq!(h.c_, 0.0);
        assert!((h.d_ - 3.0 * 0.5 / 8.0).abs() < 1e-15);
    }
}
