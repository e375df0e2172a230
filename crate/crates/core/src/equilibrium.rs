//! Symmetric equilibrium configurations of the four-body problem.
//!
//! Each family is solved for its shape parameters as a function of the mass
//! ratio μ = m/M. Positions are returned in the rotating frame with the
//! center of mass at the origin; body index 3 is always the body whose
//! linear stability is examined by default.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::common::Vec2;
use crate::numeric::{scan_roots, scan_roots2};
use crate::{Error, Result};

/// Residual bound every returned solution satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Distance from singular lines excluded from the search boxes.
pub const MARGIN: f64 = 1e-4;
const MERGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Square,
    #[value(alias = "triangle")]
    TriangleEqual,
    CollinearEqual,
    Trapezoid,
    Diamond,
    #[value(name = "triangular-1", alias = "triangular-i")]
    TriangularI,
    #[value(name = "triangular-2", alias = "triangular-ii")]
    TriangularII,
    #[value(name = "collinear-1", alias = "collinear-i")]
    CollinearPairsI,
    #[value(name = "collinear-2", alias = "collinear-ii")]
    CollinearPairsII,
    #[value(name = "collinear-3", alias = "collinear-iii")]
    CollinearPairsIII,
    #[value(name = "collinear-4", alias = "collinear-iv")]
    CollinearPairsIV,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Square,
        Family::TriangleEqual,
        Family::CollinearEqual,
        Family::Trapezoid,
        Family::Diamond,
        Family::TriangularI,
        Family::TriangularII,
        Family::CollinearPairsI,
        Family::CollinearPairsII,
        Family::CollinearPairsIII,
        Family::CollinearPairsIV,
    ];

    /// Names of the parameters accepted by [`residuals`], in order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Square | Family::TriangleEqual => &["a"],
            Family::CollinearEqual | Family::Diamond => &["alpha"],
            Family::CollinearPairsI | Family::CollinearPairsII => &["alpha"],
            Family::Trapezoid | Family::TriangularI | Family::TriangularII => &["alpha", "beta"],
            Family::CollinearPairsIII | Family::CollinearPairsIV => &["alpha", "beta", "gamma"],
        }
    }

    /// Whether the family's shape depends on μ.
    pub fn uses_mu(self) -> bool {
        !matches!(self, Family::Square | Family::TriangleEqual | Family::CollinearEqual)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub pos: Vec2,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub family: Family,
    pub mu: f64,
    /// Shape parameters by name (alpha, beta, gamma, a, C2, C4, R ...).
    pub params: BTreeMap<String, f64>,
    /// Length unit of the configuration (side a, or the reference distance).
    pub scale: f64,
    /// Angular velocity of the rigid rotation.
    pub n: f64,
    pub bodies: [Body; 4],
    /// Branch label for families with more than one solution.
    pub branch: Option<u8>,
}

impl EquilibriumSolution {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// Parameters in [`Family::param_names`] order.
    pub fn param_vector(&self) -> Vec<f64> {
        self.family.param_names().iter().filter_map(|k| self.param(k)).collect()
    }

    pub fn default_test_body(&self) -> usize {
        3
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Gravitational accelerations of every body (G = 1).
pub fn accelerations(bodies: &[Body]) -> Vec<Vec2> {
    let mut acc = vec![Vec2::ZERO; bodies.len()];
    for i in 0..bodies.len() {
        for j in 0..bodies.len() {
            // massless sources exert no pull, even when they coincide
            if i != j && bodies[j].mass != 0.0 {
                let d = bodies[j].pos - bodies[i].pos;
                let r = d.norm();
                acc[i] += d * (bodies[j].mass / (r * r * r));
            }
        }
    }
    acc
}

/// Moves the center of mass to the origin.
pub fn recenter(bodies: &mut [Body]) {
    let m: f64 = bodies.iter().map(|b| b.mass).sum();
    let c = bodies.iter().fold(Vec2::ZERO, |acc, b| acc + b.pos * b.mass) * (1.0 / m);
    for b in bodies.iter_mut() {
        b.pos -= c;
    }
}

/// Least-squares rotation rate squared of a (centered) configuration and
/// the worst relative violation of a_i = -n² r_i.
pub fn rotation_rate2(bodies: &[Body]) -> (f64, f64) {
    let acc = accelerations(bodies);
    let mut num = 0.0;
    let mut den = 0.0;
    for (b, a) in bodies.iter().zip(&acc) {
        num -= b.mass * a.dot(b.pos);
        den += b.mass * b.pos.norm2();
    }
    let n2 = num / den;
    let scale = acc.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let err = bodies
        .iter()
        .zip(&acc)
        .map(|(b, a)| (*a + b.pos * n2).norm())
        .fold(0.0, f64::max);
    (n2, err / scale)
}

fn finish(
    family: Family,
    mu: f64,
    p: BTreeMap<String, f64>,
    scale: f64,
    mut bodies: [Body; 4],
    branch: Option<u8>,
) -> Result<EquilibriumSolution> {
    recenter(&mut bodies);
    let (n2, _) = rotation_rate2(&bodies);
    if !(n2 > 0.0) {
        return Err(Error::Internal(format!("{family:?}: non-positive n² = {n2}")));
    }
    Ok(EquilibriumSolution { family, mu, params: p, scale, n: n2.sqrt(), bodies, branch })
}

fn check_mu(mu: f64, open_zero: bool) -> Result<()> {
    let ok = if open_zero { mu > 0.0 && mu <= 1.0 } else { (0.0..=1.0).contains(&mu) };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("mass ratio mu = {mu} out of range")))
    }
}

fn body(x: f64, y: f64, mass: f64) -> Body {
    Body { pos: Vec2::new(x, y), mass }
}

/// Four equal masses M at the corners of a square of side a.
pub fn solve_square(n: f64, m: f64) -> Result<EquilibriumSolution> {
    if !(n > 0.0 && m > 0.0) {
        return Err(Error::domain("square needs n > 0 and M > 0"));
    }
    let a = (m * (2.0 + 1.0 / 2f64.sqrt()) / (n * n)).cbrt();
    let h = 0.5 * a;
    let bodies = [body(-h, -h, m), body(h, -h, m), body(h, h, m), body(-h, h, m)];
    Ok(EquilibriumSolution {
        family: Family::Square,
        mu: 1.0,
        params: params(&[("a", a)]),
        scale: a,
        n,
        bodies,
        branch: None,
    })
}

/// Three masses M on an equilateral triangle of side a, a fourth M at the
/// centroid (body 3).
pub fn solve_triangle_equal(n: f64, m: f64) -> Result<EquilibriumSolution> {
    if !(n > 0.0 && m > 0.0) {
        return Err(Error::domain("triangle needs n > 0 and M > 0"));
    }
    let a = (m * (3.0 + 3f64.powf(1.5)) / (n * n)).cbrt();
    let r = a / 3f64.sqrt();
    let at = |deg: f64| {
        let t = deg.to_radians();
        body(r * t.cos(), r * t.sin(), m)
    };
    let bodies = [at(90.0), at(210.0), at(330.0), body(0.0, 0.0, m)];
    Ok(EquilibriumSolution {
        family: Family::TriangleEqual,
        mu: 1.0,
        params: params(&[("a", a)]),
        scale: a,
        n,
        bodies,
        branch: None,
    })
}

fn septic(a: f64) -> f64 {
    let a2 = a * a;
    let a3 = a2 * a;
    a3 * a3 * a + 6.0 * a3 * a2 - a2 * a2 + 25.0 * a3 + 2.0 * a2 - 1.0
}

fn collinear_equal_r(a: f64) -> f64 {
    let q = 1.0 - a * a;
    0.25 + 2.0 * (1.0 + a * a) / (q * q)
}

/// Four equal unit masses on a line at ±1 and ±α (outer distance r1 = 1).
/// `R` is the common coefficient in r̈_i = -(M/r1³) R r_i, so n² = R.
pub fn solve_collinear_equal() -> Result<EquilibriumSolution> {
    let roots = scan_roots(septic, 0.0, 1.0, 1000);
    let alpha = match roots.as_slice() {
        [a] => *a,
        _ => return Err(Error::Internal(format!("septic roots in (0,1): {roots:?}"))),
    };
    let r = collinear_equal_r(alpha);
    let bodies = [body(1.0, 0.0, 1.0), body(alpha, 0.0, 1.0), body(-alpha, 0.0, 1.0), body(-1.0, 0.0, 1.0)];
    finish(Family::CollinearEqual, 1.0, params(&[("alpha", alpha), ("R", r)]), 1.0, bodies, None)
}

fn trapezoid_f(mu: f64, al: f64, be: f64) -> Result<[f64; 2]> {
    if al < 0.0 || be <= 0.0 {
        return Err(Error::domain("trapezoid needs alpha >= 0 and beta > 0"));
    }
    let a = (be * be + 0.25 * (1.0 - al) * (1.0 - al)).sqrt();
    let b = (be * be + 0.25 * (1.0 + al) * (1.0 + al)).sqrt();
    let (a3, b3) = (a * a * a, b * b * b);
    let f1 = (1.0 + mu * al) / a3 + (1.0 - mu * al) / b3 - 2.0;
    let tail = if mu == 0.0 {
        2.0 * al
    } else if al == 0.0 {
        return Err(Error::domain("alpha = 0 is singular for mu > 0"));
    } else {
        2.0 * al * (1.0 - mu / (al * al * al))
    };
    let f2 = (1.0 - al * mu) * (al + 1.0) / b3 + (1.0 + al * mu) * (al - 1.0) / a3 - tail;
    Ok([f1, f2])
}

fn trapezoid_bodies(mu: f64, al: f64, be: f64) -> [Body; 4] {
    let lo = -mu * be / (1.0 + mu);
    let hi = be / (1.0 + mu);
    [body(-0.5, lo, 1.0), body(-0.5 * al, hi, mu), body(0.5 * al, hi, mu), body(0.5, lo, 1.0)]
}

/// Isosceles trapezoid: masses M on the base (distance 1 apart), masses m on
/// the top edge of length α, height β.
pub fn solve_trapezoid(mu: f64) -> Result<EquilibriumSolution> {
    check_mu(mu, false)?;
    let (al, be) = if mu == 0.0 {
        // the small masses merge at the Lagrange point L4
        (0.0, 0.75f64.sqrt())
    } else {
        let f = move |a: f64, b: f64| trapezoid_f(mu, a, b).ok();
        let roots = scan_roots2(&f, (MARGIN, 1.2), (MARGIN, 1.2), 120, RESIDUAL_TOL, MERGE);
        let best = roots
            .into_iter()
            .filter(|r| r[0] <= 1.0 + 1e-9)
            .min_by(|a, b| a[0].total_cmp(&b[0]))
            .ok_or(Error::NoSolution { residual: best_residual(&f, (MARGIN, 1.2), (MARGIN, 1.2)) })?;
        (best[0], best[1])
    };
    let a = (be * be + 0.25 * (1.0 - al) * (1.0 - al)).sqrt();
    let b = (be * be + 0.25 * (1.0 + al) * (1.0 + al)).sqrt();
    let p = params(&[("alpha", al), ("beta", be), ("a", a), ("b", b)]);
    finish(Family::Trapezoid, mu, p, 1.0, trapezoid_bodies(mu, al, be), None)
}

fn best_residual(f: &crate::numeric::Fn2, xr: (f64, f64), yr: (f64, f64)) -> f64 {
    let n = 60;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n {
            let x = xr.0 + (xr.1 - xr.0) * i as f64 / n as f64;
            let y = yr.0 + (yr.1 - yr.0) * j as f64 / n as f64;
            if let Some(v) = f(x, y) {
                let r = v[0].abs().max(v[1].abs());
                if r.is_finite() {
                    best = best.min(r);
                }
            }
        }
    }
    best
}

fn diamond_g(mu: f64, al: f64) -> f64 {
    let q = (1.0 + al * al).powf(1.5);
    0.25 + 2.0 * mu / q - mu / (4.0 * al * al * al) - 2.0 / q
}

/// Rhombus: masses M at (±1, 0), masses m at (0, ±α).
pub fn solve_diamond(mu: f64) -> Result<EquilibriumSolution> {
    check_mu(mu, false)?;
    let roots = scan_roots(|a| diamond_g(mu, a), 0.2, 3.0, 2000);
    let al = *roots.first().ok_or(Error::NoSolution { residual: f64::NAN })?;
    let bodies = [body(-1.0, 0.0, 1.0), body(0.0, al, mu), body(1.0, 0.0, 1.0), body(0.0, -al, mu)];
    finish(Family::Diamond, mu, params(&[("alpha", al)]), 1.0, bodies, None)
}

/// The C2, C4 coefficients of the triangular case with the heavy pair on
/// the base. Requires α, β > 1/2 and α ≠ β.
pub fn triangular_c24(mu: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if a <= 0.5 || b <= 0.5 || a == b {
        return Err(Error::domain("triangular case needs alpha, beta > 1/2 and alpha != beta"));
    }
    let s = ((4.0 * a * a - 1.0) * (4.0 * b * b - 1.0)).sqrt();
    let d = 2.0 * (a * a - b * b);
    let c2 = (-1.0 + 4.0 * a * a - mu + 2.0 * mu * a * a + 2.0 * mu * b * b - (1.0 + mu) * s) / d;
    let c4 = (1.0 - 4.0 * b * b + mu - 2.0 * mu * a * a - 2.0 * mu * b * b + (1.0 + mu) * s) / d;
    Ok((c2, c4))
}

fn triangular1_f(mu: f64, a: f64, b: f64) -> Result<[f64; 2]> {
    let (c2, c4) = triangular_c24(mu, a, b)?;
    let (a3, b3) = (a * a * a, b * b * b);
    let f1 = c2 / a3 + c4 / b3 - 2.0;
    // radial balance of the apex-side body on the symmetry axis
    let dc = c2 - c4;
    let h3 = (b * b - 0.25).powf(1.5);
    let f2 = c4 * (2.0 + mu * (1.0 / a3 + 1.0 / b3)) - 2.0 * (c4 + mu) / b3
        + mu * (c4 + mu).powi(3) * dc.signum() / (dc * dc * h3);
    Ok([f1, f2])
}

fn triangular1_bodies(mu: f64, a: f64, b: f64) -> Result<[Body; 4]> {
    let (c2, c4) = triangular_c24(mu, a, b)?;
    let x = (b * b - 0.25).sqrt() / (c4 + mu);
    Ok([
        body(-mu * x, -0.5, 1.0),
        body(c2 * x, 0.0, mu),
        body(-mu * x, 0.5, 1.0),
        body(c4 * x, 0.0, mu),
    ])
}

fn refine_roots(f: &crate::numeric::Fn2, coarse: Vec<[f64; 2]>, lo: (f64, f64)) -> Vec<[f64; 2]> {
    let mut all = coarse.clone();
    for r in coarse {
        let w = 0.02;
        let xr = ((r[0] - w).max(lo.0), r[0] + w);
        let yr = ((r[1] - w).max(lo.1), r[1] + w);
        for q in scan_roots2(f, xr, yr, 80, RESIDUAL_TOL, MERGE) {
            if !all.iter().any(|p| (p[0] - q[0]).hypot(p[1] - q[1]) < MERGE) {
                all.push(q);
            }
        }
    }
    all
}

/// Triangle with the two heavy masses M on the base (unit separation) and
/// two light masses m on the symmetry axis; α and β are the distances of
/// the outer and inner light mass from a base mass. Solutions are ordered
/// by β ascending; with two roots the larger β is labeled branch 1.
pub fn solve_triangular_case1(mu: f64) -> Result<Vec<EquilibriumSolution>> {
    check_mu(mu, true)?;
    let f = move |a: f64, b: f64| {
        if a - b < MARGIN {
            return None;
        }
        triangular1_f(mu, a, b).ok()
    };
    let xr = (0.5 + MARGIN, 2.0);
    let yr = (0.5 + MARGIN, 1.5);
    let coarse = scan_roots2(&f, xr, yr, 150, RESIDUAL_TOL, MERGE);
    let mut roots = refine_roots(&f, coarse, (xr.0, yr.0));
    roots.sort_by(|p, q| p[1].total_cmp(&q[1]));
    let count = roots.len();
    roots
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let (c2, c4) = triangular_c24(mu, r[0], r[1])?;
            let branch = (count == 2).then_some(if k == 1 { 1 } else { 2 });
            let p = params(&[("alpha", r[0]), ("beta", r[1]), ("C2", c2), ("C4", c4)]);
            finish(Family::TriangularI, mu, p, 1.0, triangular1_bodies(mu, r[0], r[1])?, branch)
        })
        .collect()
}

fn triangular2_g(mu: f64, a: f64, b: f64) -> [f64; 2] {
    let ka = ((0.5 + a * (1.0 + mu)).powi(2) + b * b).powf(1.5);
    let kb = ((-0.5 + a * (1.0 + mu)).powi(2) + b * b).powf(1.5);
    let g1 = (mu * a + 0.5) / ka + (mu * a - 0.5) / kb - mu * a / (4.0 * b * b * b);
    let g2 = (0.5 - mu * a) * (a * (1.0 + mu) + 0.5) / ka + (0.5 + mu * a) * (a * (1.0 + mu) - 0.5) / kb - a;
    [g1, g2]
}

fn triangular2_bodies(mu: f64, a: f64, b: f64) -> [Body; 4] {
    [
        body(a, b, mu),
        body(-0.5 - mu * a, 0.0, 1.0),
        body(a, -b, mu),
        body(0.5 - mu * a, 0.0, 1.0),
    ]
}

/// Triangle with the two light masses m off the axis at (α, ±β) and the
/// heavy masses M on the axis at unit separation. The line α = 0 solves the
/// equations trivially and is excluded.
pub fn solve_triangular_case2(mu: f64) -> Result<Vec<EquilibriumSolution>> {
    check_mu(mu, true)?;
    let f = move |a: f64, b: f64| Some(triangular2_g(mu, a, b));
    let xr = (1e-2, 2.0);
    let yr = (0.5 + MARGIN, 1.5);
    let coarse = scan_roots2(&f, xr, yr, 150, RESIDUAL_TOL, MERGE);
    let mut roots = refine_roots(&f, coarse, (xr.0, yr.0));
    roots.retain(|r| r[0] > 1e-3);
    roots.sort_by(|p, q| p[0].total_cmp(&q[0]));
    roots
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let p = params(&[("alpha", r[0]), ("beta", r[1])]);
            finish(Family::TriangularII, mu, p, 1.0, triangular2_bodies(mu, r[0], r[1]), Some(k as u8 + 1))
        })
        .collect()
}

fn h1(mu: f64, a: f64) -> f64 {
    let q = 1.0 - a * a;
    (2.0 * (1.0 + a * a) + 4.0 * mu) / (q * q) + 0.25 * (mu - 1.0 / (a * a * a))
}

fn h2(mu: f64, a: f64) -> f64 {
    let q = 1.0 - a * a;
    0.25 * (1.0 - mu / (a * a * a)) + 2.0 * (2.0 + mu * (1.0 + a * a)) / (q * q)
}

/// (α, β, γ) residuals of the third collinear case with γ from the
/// center-of-mass constraint.
fn collinear3_f(mu: f64, a: f64, b: f64) -> Result<([f64; 2], f64)> {
    let g = a + mu * (1.0 - b);
    if !(a > 0.0 && a < 1.0 && b > 0.0 && g > b) {
        return Err(Error::domain("collinear case III needs 0 < alpha < 1 and 0 < beta < gamma"));
    }
    let r1 = 1.0 / (1.0 - a).powi(2) + mu / (1.0 + b).powi(2) + 1.0 / (1.0 + g).powi(2);
    let r2 = (mu / (a + b).powi(2) - mu / (1.0 - a).powi(2) + 1.0 / (a + g).powi(2)) / a;
    let r3 = (mu / (1.0 + b).powi(2) + 1.0 / (a + b).powi(2) - 1.0 / (g - b).powi(2)) / b;
    Ok(([r2 - r1, r3 - r1], g))
}

fn collinear4_f(mu: f64, b: f64, g: f64) -> Result<([f64; 2], f64)> {
    let a = mu * (b + g) - 1.0;
    if !(a < 1.0 && b > 0.0 && g > b && a > -b) {
        return Err(Error::domain("collinear case IV needs -beta < alpha < 1 and 0 < beta < gamma"));
    }
    let r1 = 1.0 / (1.0 - a).powi(2) + mu * (1.0 / (1.0 + b).powi(2) + 1.0 / (1.0 + g).powi(2));
    let r3 = (1.0 / (1.0 + b).powi(2) + 1.0 / (a + b).powi(2) - mu / (g - b).powi(2)) / b;
    let r4 = (1.0 / (1.0 + g).powi(2) + mu / (g - b).powi(2) + 1.0 / (g + a).powi(2)) / g;
    Ok(([r3 - r1, r4 - r1], a))
}

/// Which collinear arrangement of two pairs is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollinearCase {
    /// m at ±1, M at ±α
    I,
    /// M at ±1, m at ±α
    II,
    /// positions 1, α, -β, -γ with masses m, M, m, M
    III,
    /// positions 1, α, -β, -γ with masses M, M, m, m
    IV,
}

impl CollinearCase {
    pub fn family(self) -> Family {
        match self {
            CollinearCase::I => Family::CollinearPairsI,
            CollinearCase::II => Family::CollinearPairsII,
            CollinearCase::III => Family::CollinearPairsIII,
            CollinearCase::IV => Family::CollinearPairsIV,
        }
    }
}

/// Collinear configurations of two pairs of equal masses with the end body
/// at x = 1. Cases I and II are symmetric about the origin.
pub fn solve_collinear_pairs(case: CollinearCase, mu: f64) -> Result<EquilibriumSolution> {
    check_mu(mu, case == CollinearCase::II)?;
    let family = case.family();
    match case {
        CollinearCase::I | CollinearCase::II => {
            let h = |a: f64| if case == CollinearCase::I { h1(mu, a) } else { h2(mu, a) };
            let roots = scan_roots(h, MARGIN, 1.0 - MARGIN, 4000);
            let al = *roots.first().ok_or(Error::NoSolution { residual: f64::NAN })?;
            let (end, mid) = if case == CollinearCase::I { (mu, 1.0) } else { (1.0, mu) };
            let bodies = [body(1.0, 0.0, end), body(al, 0.0, mid), body(-al, 0.0, mid), body(-1.0, 0.0, end)];
            finish(family, mu, params(&[("alpha", al)]), 1.0, bodies, None)
        }
        CollinearCase::III => {
            let f = move |a: f64, b: f64| collinear3_f(mu, a, b).ok().map(|p| p.0);
            let xr = (MARGIN, 1.0 - MARGIN);
            let yr = (MARGIN, 2.0);
            let roots = scan_roots2(&f, xr, yr, 120, RESIDUAL_TOL, MERGE);
            let r = *roots.first().ok_or(Error::NoSolution { residual: best_residual(&f, xr, yr) })?;
            let (_, g) = collinear3_f(mu, r[0], r[1])?;
            let bodies = [body(1.0, 0.0, mu), body(r[0], 0.0, 1.0), body(-r[1], 0.0, mu), body(-g, 0.0, 1.0)];
            let p = params(&[("alpha", r[0]), ("beta", r[1]), ("gamma", g)]);
            finish(family, mu, p, 1.0, bodies, None)
        }
        CollinearCase::IV => {
            let f = move |b: f64, g: f64| collinear4_f(mu, b, g).ok().map(|p| p.0);
            let xr = (MARGIN, 3.0);
            let yr = (MARGIN, 3.0);
            let roots = scan_roots2(&f, xr, yr, 150, RESIDUAL_TOL, MERGE);
            let r = *roots.first().ok_or(Error::NoSolution { residual: best_residual(&f, xr, yr) })?;
            let (_, a) = collinear4_f(mu, r[0], r[1])?;
            let bodies = [body(1.0, 0.0, 1.0), body(a, 0.0, 1.0), body(-r[0], 0.0, mu), body(-r[1], 0.0, mu)];
            let p = params(&[("alpha", a), ("beta", r[0]), ("gamma", r[1])]);
            finish(family, mu, p, 1.0, bodies, None)
        }
    }
}

/// Convenience dispatcher: every solution of `family` at `mu` (square and
/// triangle use n = M = 1).
pub fn solve(family: Family, mu: f64) -> Result<Vec<EquilibriumSolution>> {
    match family {
        Family::Square => Ok(vec![solve_square(1.0, 1.0)?]),
        Family::TriangleEqual => Ok(vec![solve_triangle_equal(1.0, 1.0)?]),
        Family::CollinearEqual => Ok(vec![solve_collinear_equal()?]),
        Family::Trapezoid => Ok(vec![solve_trapezoid(mu)?]),
        Family::Diamond => Ok(vec![solve_diamond(mu)?]),
        Family::TriangularI => solve_triangular_case1(mu),
        Family::TriangularII => solve_triangular_case2(mu),
        Family::CollinearPairsI => Ok(vec![solve_collinear_pairs(CollinearCase::I, mu)?]),
        Family::CollinearPairsII => Ok(vec![solve_collinear_pairs(CollinearCase::II, mu)?]),
        Family::CollinearPairsIII => Ok(vec![solve_collinear_pairs(CollinearCase::III, mu)?]),
        Family::CollinearPairsIV => Ok(vec![solve_collinear_pairs(CollinearCase::IV, mu)?]),
    }
}

/// Defining-equation residuals of `family` at `params` (ordered as in
/// [`Family::param_names`]). Square and triangle residuals use n = M = 1.
pub fn residuals(family: Family, mu: f64, p: &[f64]) -> Result<Vec<f64>> {
    let want = family.param_names().len();
    if p.len() != want {
        return Err(Error::domain(format!(
            "{family:?} takes {want} parameter(s) ({}), got {}",
            family.param_names().join(", "),
            p.len()
        )));
    }
    let need_unit = |a: f64| {
        if a > 0.0 && a < 1.0 {
            Ok(())
        } else {
            Err(Error::domain("alpha must lie in (0, 1); alpha = 1 is singular"))
        }
    };
    Ok(match family {
        Family::Square => vec![p[0].powi(3) - (2.0 + 1.0 / 2f64.sqrt())],
        Family::TriangleEqual => vec![p[0].powi(3) - (3.0 + 3f64.powf(1.5))],
        Family::CollinearEqual => vec![septic(p[0])],
        Family::Trapezoid => trapezoid_f(mu, p[0], p[1])?.to_vec(),
        Family::Diamond => {
            if p[0] <= 0.0 {
                return Err(Error::domain("alpha must be positive"));
            }
            vec![diamond_g(mu, p[0])]
        }
        Family::TriangularI => triangular1_f(mu, p[0], p[1])?.to_vec(),
        Family::TriangularII => triangular2_g(mu, p[0], p[1]).to_vec(),
        Family::CollinearPairsI => {
            need_unit(p[0])?;
            vec![h1(mu, p[0])]
        }
        Family::CollinearPairsII => {
            need_unit(p[0])?;
            vec![h2(mu, p[0])]
        }
        Family::CollinearPairsIII => {
            let (r, g) = collinear3_f(mu, p[0], p[1])?;
            vec![r[0], r[1], p[2] - g]
        }
        Family::CollinearPairsIV => {
            let (r, a) = collinear4_f(mu, p[1], p[2])?;
            vec![r[0], r[1], p[0] - a]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn septic_root() {
        let s = solve_collinear_equal().unwrap();
        assert!((s.param("alpha").unwrap() - 0.316_243_493).abs() < 1e-8);
        assert!((s.n * s.n - s.param("R").unwrap()).abs() < 1e-10);
    }

    #[test]
    fn diamond_limits() {
        assert!((solve_diamond(1.0).unwrap().param("alpha").unwrap() - 1.0).abs() < 1e-12);
        assert!((solve_diamond(0.0).unwrap().param("alpha").unwrap() - 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn wrong_param_count() {
        assert!(residuals(Family::Trapezoid, 0.5, &[1.0]).is_err());
        assert!(residuals(Family::CollinearPairsI, 0.5, &[1.0]).is_err());
    }
}
