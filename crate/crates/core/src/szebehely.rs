//! Sundman-inequality boundary surfaces, the Szebehely ladder and the
//! critical constant of the symmetric five-body problem, plus the n-pair
//! generalization.
//!
//! Dimensionless variables: ρ_i = E0 r_i, ρ_n = max(ρ1, ρ2), y_i = ρ_i / ρ_n
//! and x12 = |P1P2| / r_n. The allowed region at a given shape is
//! ρ_n² − A ρ_n + C0 / (4S) ≤ 0 with S = μ1y1² + μ2y2² and C = A²S.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{Hierarchy, MassRatios, MassVector};
use crate::numeric::golden_section;
use crate::{Error, Result};

/// Clipping distance from the singular ends of the y domain.
pub const DELTA: f64 = 1e-6;
/// Guard band used when comparing C0 against a rung.
pub const REGIME_GUARD: f64 = 1e-12;
const GRID_POINTS: usize = 1024;
const KIN_TOL: f64 = 1e-12;

fn check_y(y: f64, upper_open: bool) -> Result<()> {
    let ok = if upper_open { y > 0.0 && y < 1.0 } else { y > 0.0 && y <= 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "y = {y} outside {}",
            if upper_open { "(0, 1)" } else { "(0, 1]" }
        )))
    }
}

/// Pair term of the potential for the two kinematic extremes (collinear,
/// `e`) and for the minimizing separation (`m`).
fn pair_e(y: f64) -> f64 {
    1.0 / (1.0 - y * y)
}

fn pair_m(y: f64) -> f64 {
    1.0 / (1.0 + y * y).sqrt()
}

fn c_half(y: f64, r: &MassRatios, primed: bool, pair: f64) -> f64 {
    let (m0, m1, m2) = (r.mu0, r.mu1, r.mu2);
    let (s, a) = if primed {
        (
            m1 * y * y + m2,
            0.5 * (m1 * m1 / y + m2 * m2) + 2.0 * m0 * (m1 / y + m2) + 4.0 * m1 * m2 * pair,
        )
    } else {
        (
            m1 + m2 * y * y,
            0.5 * (m1 * m1 + m2 * m2 / y) + 2.0 * m0 * (m1 + m2 / y) + 4.0 * m1 * m2 * pair,
        )
    };
    s * a * a
}

/// Maximum-extension function for ρ1 > ρ2, with y = ρ2/ρ1.
pub fn c_e(y: f64, r: &MassRatios) -> Result<f64> {
    check_y(y, true)?;
    Ok(c_half(y, r, false, pair_e(y)))
}

/// Maximum-extension function for ρ2 > ρ1, with y = ρ1/ρ2.
pub fn c_e_prime(y: f64, r: &MassRatios) -> Result<f64> {
    check_y(y, true)?;
    Ok(c_half(y, r, true, pair_e(y)))
}

/// Minima function for ρ1 > ρ2.
pub fn c_m(y: f64, r: &MassRatios) -> Result<f64> {
    check_y(y, false)?;
    Ok(c_half(y, r, false, pair_m(y)))
}

/// Minima function for ρ2 > ρ1.
pub fn c_m_prime(y: f64, r: &MassRatios) -> Result<f64> {
    check_y(y, false)?;
    Ok(c_half(y, r, true, pair_m(y)))
}

fn check_kinematics(y1: f64, y2: f64, x12: f64) -> Result<f64> {
    if !(y1 > 0.0 && y1 <= 1.0 && y2 > 0.0 && y2 <= 1.0) {
        return Err(Error::Kinematic(format!("y1 = {y1}, y2 = {y2} must lie in (0, 1]")));
    }
    if (y1.max(y2) - 1.0).abs() > KIN_TOL {
        return Err(Error::Kinematic(format!("max(y1, y2) = {} must be 1", y1.max(y2))));
    }
    let lo = (y1 - y2).abs();
    let hi = y1 + y2;
    if x12 < lo - KIN_TOL || x12 > hi + KIN_TOL {
        return Err(Error::Kinematic(format!("x12 = {x12} outside [{lo}, {hi}]")));
    }
    let x12 = x12.clamp(lo, hi);
    let other2 = 2.0 * (y1 * y1 + y2 * y2) - x12 * x12;
    if x12 <= 0.0 || other2 <= 0.0 {
        return Err(Error::Kinematic("bodies coincide at this shape".into()));
    }
    Ok(x12)
}

/// The A factor of the Sundman boundary: ρ_n U / E0 in dimensionless form.
pub fn sundman_a(y1: f64, y2: f64, x12: f64, r: &MassRatios) -> Result<f64> {
    let x12 = check_kinematics(y1, y2, x12)?;
    let x14 = (2.0 * (y1 * y1 + y2 * y2) - x12 * x12).sqrt();
    let (m0, m1, m2) = (r.mu0, r.mu1, r.mu2);
    Ok(0.5 * (m1 * m1 / y1 + m2 * m2 / y2)
        + 2.0 * m1 * m2 * (1.0 / x12 + 1.0 / x14)
        + 2.0 * m0 * (m1 / y1 + m2 / y2))
}

/// Boundary surface C(y1, y2, x12) = A² (μ1y1² + μ2y2²).
pub fn c_surface(y1: f64, y2: f64, x12: f64, r: &MassRatios) -> Result<f64> {
    let a = sundman_a(y1, y2, x12, r)?;
    Ok(a * a * (r.mu1 * y1 * y1 + r.mu2 * y2 * y2))
}

/// Roots in ρ_n of the Sundman equality at a fixed shape. Empty when the
/// shape is forbidden (C < C0).
pub fn boundary_rho(y1: f64, y2: f64, x12: f64, c0: f64, r: &MassRatios) -> Result<Vec<f64>> {
    let c = c_surface(y1, y2, x12, r)?;
    let s = r.mu1 * y1 * y1 + r.mu2 * y2 * y2;
    Ok(rho_roots(c, s, c0))
}

fn rho_roots(c: f64, s: f64, c0: f64) -> Vec<f64> {
    if c < c0 {
        return Vec::new();
    }
    let half = 0.5 * (c / s).sqrt();
    if c == c0 {
        return vec![half];
    }
    let w = (1.0 - c0 / c).sqrt();
    vec![half * (1.0 - w), half * (1.0 + w)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzebehelyLadder {
    /// min C_m
    pub r1: f64,
    /// min C_m′
    pub r2: f64,
    /// min C_e
    pub r3: f64,
    /// min C_e′
    pub r4: f64,
    /// y locations of the four minima, in rung order.
    pub argmins: [f64; 4],
    pub c_crit: f64,
}

impl SzebehelyLadder {
    pub fn rungs(&self) -> [f64; 4] {
        [self.r1, self.r2, self.r3, self.r4]
    }
}

/// Grid on [lo, hi], geometrically refined toward both ends.
fn bracket_grid(lo: f64, hi: f64) -> Vec<f64> {
    let half = GRID_POINTS / 2;
    let mid = 0.5 * (lo + hi);
    let mut g = Vec::with_capacity(GRID_POINTS + 1);
    for k in 0..half {
        let s = 10f64.powf(-8.0 * (1.0 - k as f64 / half as f64));
        g.push(lo + (mid - lo) * s);
    }
    g.push(mid);
    for k in (0..half).rev() {
        let s = 10f64.powf(-8.0 * (1.0 - k as f64 / half as f64));
        g.push(hi - (hi - mid) * s);
    }
    g.insert(0, lo);
    g.push(hi);
    g
}

/// Global minimum of a smooth 1-D function: bracketing grid then golden
/// section between the neighbours of the best node.
pub fn minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let g = bracket_grid(lo, hi);
    let vals: Vec<f64> = g.iter().map(|&y| f(y)).collect();
    let k = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|p| p.0)
        .unwrap_or(0);
    let a = g[k.saturating_sub(1)];
    let b = g[(k + 1).min(g.len() - 1)];
    let best = golden_section(&f, a, b, 1e-12);
    if vals[k] < best.1 {
        (g[k], vals[k])
    } else {
        best
    }
}

/// The four rungs and the critical constant.
pub fn ladder(r: &MassRatios) -> Result<SzebehelyLadder> {
    if r.mu1 <= 0.0 || r.mu2 <= 0.0 {
        return Err(Error::domain("the ladder needs mu1 > 0 and mu2 > 0"));
    }
    let (y1, r1) = minimize(|y| c_half(y, r, false, pair_m(y)), DELTA, 1.0);
    let (y2, r2) = minimize(|y| c_half(y, r, true, pair_m(y)), DELTA, 1.0);
    let (y3, r3) = minimize(|y| c_half(y, r, false, pair_e(y)), DELTA, 1.0 - DELTA);
    let (y4, r4) = minimize(|y| c_half(y, r, true, pair_e(y)), DELTA, 1.0 - DELTA);
    Ok(SzebehelyLadder { r1, r2, r3, r4, argmins: [y1, y2, y3, y4], c_crit: r3.max(r4) })
}

/// Topology of the allowed region for a given C0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    FullyConnected,
    /// Forbidden hole around the origin; both arms still reachable.
    CentralHole,
    /// Exactly one single-binary hierarchy is sealed off.
    OneHierarchyStable(Hierarchy),
    FullyDisconnected,
}

/// Classifies C0 against the rungs. Ties go to the more connected regime.
pub fn regime(c0: f64, l: &SzebehelyLadder) -> Regime {
    let above = |rung: f64| c0 > rung + REGIME_GUARD;
    if !above(l.r1.max(l.r2)) {
        Regime::FullyConnected
    } else if !above(l.r3.min(l.r4)) {
        Regime::CentralHole
    } else if !above(l.c_crit) {
        // the ρ1 > ρ2 arm (24 binary) closes at R3, the ρ2 > ρ1 arm at R4
        if l.r3 < l.r4 {
            Regime::OneHierarchyStable(Hierarchy::H24)
        } else {
            Regime::OneHierarchyStable(Hierarchy::H13)
        }
    } else {
        Regime::FullyDisconnected
    }
}

/// Converts a constant from the mass-ratio normalization to the alternate
/// four-body normalization: C_A = (2μ + 2) C_S. Never applied implicitly.
pub fn csfbp_alternate(c_s: f64, mu: f64) -> f64 {
    (2.0 * mu + 2.0) * c_s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Half {
    /// ρ1 > ρ2
    Rho1,
    /// ρ2 > ρ1
    Rho2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionCurve {
    pub half: Half,
    /// +1 for the outer root, -1 for the inner one.
    pub sign: i8,
    /// Index of this unbroken piece along the sweep.
    pub segment: usize,
    /// (y, ρ1, ρ2)
    pub points: Vec<[f64; 3]>,
}

impl ProjectionCurve {
    pub fn label(&self) -> String {
        let h = match self.half {
            Half::Rho1 => "I",
            Half::Rho2 => "III",
        };
        let s = if self.sign > 0 { '+' } else { '-' };
        format!("{h}{s}{}", self.segment)
    }
}

/// Projections of the maximum extensions onto the (ρ1, ρ2) plane. Each
/// half-space is swept in y; pieces are split where C < C0.
pub fn project_max_extensions(r: &MassRatios, c0: f64, samples: usize) -> Result<Vec<ProjectionCurve>> {
    if samples < 2 {
        return Err(Error::domain("samples must be at least 2"));
    }
    let mut out = Vec::new();
    for half in [Half::Rho1, Half::Rho2] {
        let primed = half == Half::Rho2;
        let mut pieces: [Vec<Vec<[f64; 3]>>; 2] = [vec![Vec::new()], vec![Vec::new()]];
        for k in 0..samples {
            let y = DELTA + (1.0 - 2.0 * DELTA) * k as f64 / (samples - 1) as f64;
            let c = c_half(y, r, primed, pair_e(y));
            let s = if primed { r.mu1 * y * y + r.mu2 } else { r.mu1 + r.mu2 * y * y };
            let roots = rho_roots(c, s, c0);
            if roots.is_empty() {
                for p in pieces.iter_mut() {
                    if !p.last().map_or(true, Vec::is_empty) {
                        p.push(Vec::new());
                    }
                }
                continue;
            }
            let (lo, hi) = (roots[0], *roots.last().unwrap_or(&roots[0]));
            for (idx, rho) in [(0, hi), (1, lo)] {
                let pt = if primed { [y, y * rho, rho] } else { [y, rho, y * rho] };
                if let Some(seg) = pieces[idx].last_mut() {
                    seg.push(pt);
                }
            }
        }
        for (idx, sign) in [(0usize, 1i8), (1, -1)] {
            let segs = std::mem::take(&mut pieces[idx]);
            for (segment, points) in segs.into_iter().filter(|s| !s.is_empty()).enumerate() {
                out.push(ProjectionCurve { half, sign, segment, points });
            }
        }
    }
    Ok(out)
}

/// Lower and upper bounds of the n-pair boundary constant at the shape
/// `y` (one entry per pair).
pub fn csnbp_c_bounds(m: &MassVector, y: &[f64]) -> Result<(f64, f64)> {
    if y.len() != m.mu.len() {
        return Err(Error::domain("y and mu must have the same length"));
    }
    if y.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::domain("every y_i must lie in (0, 1]"));
    }
    let n = y.len();
    let s: f64 = (0..n).map(|i| m.mu[i] * y[i] * y[i]).sum();
    let own: f64 = (0..n).map(|i| 0.5 * m.mu[i] * m.mu[i] / y[i]).sum();
    let central: f64 = 2.0 * m.mu0 * (0..n).map(|i| m.mu[i] / y[i]).sum::<f64>();
    let mut kmin = 0.0;
    let mut kmax = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let p = m.mu[i] * m.mu[j];
            kmin += 4.0 * p / (y[i] * y[i] + y[j] * y[j]).sqrt();
            let d = (y[i] * y[i] - y[j] * y[j]).abs();
            if d == 0.0 {
                return Err(Error::domain(format!("y_{} = y_{} makes the upper bound singular", i + 1, j + 1)));
            }
            kmax += 4.0 * p * y[i].max(y[j]) / d;
        }
    }
    let lo = own + kmin + central;
    let hi = own + kmax + central;
    Ok((s * lo * lo, s * hi * hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub mu0: f64,
    pub mu1: f64,
    pub c_crit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritSurface {
    pub points: Vec<SurfacePoint>,
    pub argmax: SurfacePoint,
}

/// Evenly spaced values lo, lo + step, ... ≤ hi (robust to rounding).
/// Empty unless step > 0 and lo <= hi.
pub fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0 && hi >= lo) {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + step * k as f64).collect()
}

/// C_crit over a (μ0, μ1) grid. Points without two positive pair masses
/// are skipped. Output order follows the input grid.
pub fn c_crit_surface(mu0s: &[f64], mu1s: &[f64]) -> Result<CritSurface> {
    let cells: Vec<(f64, f64)> = mu0s
        .iter()
        .flat_map(|&a| mu1s.iter().map(move |&b| (a, b)))
        .collect();
    let points: Vec<SurfacePoint> = cells
        .par_iter()
        .filter_map(|&(mu0, mu1)| {
            let r = MassRatios::from_mu0_mu1(mu0, mu1).ok()?;
            if r.mu1 <= 1e-9 || r.mu2 <= 1e-9 {
                return None;
            }
            let l = ladder(&r).ok()?;
            Some(SurfacePoint { mu0, mu1, c_crit: l.c_crit })
        })
        .collect();
    let argmax = *points
        .iter()
        .max_by(|a, b| a.c_crit.total_cmp(&b.c_crit))
        .ok_or_else(|| Error::domain("no valid grid points"))?;
    Ok(CritSurface { points, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_mass_symmetry() {
        let r = MassRatios::equal_cs5bp();
        for y in [0.1, 0.3, 0.5, 0.9] {
            assert!((c_e(y, &r).unwrap() - c_e_prime(y, &r).unwrap()).abs() < 1e-15);
            assert!((c_m(y, &r).unwrap() - c_m_prime(y, &r).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_errors() {
        let r = MassRatios::equal_cs5bp();
        assert!(c_e(1.0, &r).is_err());
        assert!(c_m(1.0, &r).is_ok());
        assert!(c_m(0.0, &r).is_err());
        assert!(c_surface(1.0, 0.5, 0.4, &r).is_err());
        assert!(c_surface(0.9, 0.5, 0.5, &r).is_err());
    }

    #[test]
    fn regime_guard_ties_connect() {
        let l = ladder(&MassRatios::equal_cs5bp()).unwrap();
        assert_eq!(regime(l.r1, &l), Regime::FullyConnected);
        assert_eq!(regime(l.c_crit, &l), Regime::CentralHole);
        assert_eq!(regime(0.07, &l), Regime::FullyDisconnected);
    }

    #[test]
    fn grid_is_sorted() {
        let g = bracket_grid(1e-6, 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.len(), GRID_POINTS + 3);
    }
}
