//! Shared domain types and geometric helpers (G = 1 everywhere).

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on the unit-sum mass constraint.
pub const MASS_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Normalized masses of the CS5BP: a central body `mu0` and two mirror pairs.
///
/// With total mass 1 the ratios are the masses themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRatios")]
pub struct MassRatios {
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
}

#[derive(Deserialize)]
struct RawRatios {
    mu0: f64,
    mu1: f64,
    mu2: f64,
}

impl TryFrom<RawRatios> for MassRatios {
    type Error = Error;
    fn try_from(r: RawRatios) -> Result<Self> {
        MassRatios::new(r.mu0, r.mu1, r.mu2)
    }
}

impl MassRatios {
    pub fn new(mu0: f64, mu1: f64, mu2: f64) -> Result<Self> {
        if ![mu0, mu1, mu2].iter().all(|m| m.is_finite()) {
            return Err(Error::domain("mass ratios must be finite"));
        }
        if !(0.0..=1.0).contains(&mu0) || !(0.0..=0.5).contains(&mu1) || !(0.0..=0.5).contains(&mu2)
        {
            return Err(Error::domain(format!(
                "mass ratios out of range: mu0={mu0}, mu1={mu1}, mu2={mu2}"
            )));
        }
        let sum = 2.0 * (mu1 + mu2) + mu0;
        if (sum - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::domain(format!(
                "2(mu1 + mu2) + mu0 = {sum}, expected 1"
            )));
        }
        Ok(MassRatios { mu0, mu1, mu2 })
    }

    /// Completes the triple from `mu0` and `mu1`.
    pub fn from_mu0_mu1(mu0: f64, mu1: f64) -> Result<Self> {
        MassRatios::new(mu0, mu1, 0.5 * (1.0 - mu0) - mu1)
    }

    /// Five equal masses.
    pub fn equal_cs5bp() -> Self {
        MassRatios { mu0: 0.2, mu1: 0.2, mu2: 0.2 }
    }

    /// Four equal masses, no central body.
    pub fn equal_csfbp() -> Self {
        MassRatios { mu0: 0.0, mu1: 0.25, mu2: 0.25 }
    }

    /// Masses of P1..P4 in the expanded four-body picture.
    pub fn pair_masses(&self) -> [f64; 4] {
        [self.mu1, self.mu2, self.mu1, self.mu2]
    }
}

/// Ratios of the general n-pair problem: `mu[i]` per mirror pair plus a
/// central `mu0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassVector {
    pub mu: Vec<f64>,
    pub mu0: f64,
}

impl MassVector {
    pub fn new(mu: Vec<f64>, mu0: f64) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::domain("at least one pair is required"));
        }
        if mu.iter().chain([&mu0]).any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::domain("mass ratios must be finite and non-negative"));
        }
        let sum = mu.iter().sum::<f64>() + 0.5 * mu0;
        if (sum - 0.5).abs() > MASS_SUM_TOL {
            return Err(Error::domain(format!(
                "sum(mu_i) + mu0/2 = {sum}, expected 1/2"
            )));
        }
        Ok(MassVector { mu, mu0 })
    }
}

impl From<MassRatios> for MassVector {
    fn from(r: MassRatios) -> Self {
        MassVector { mu: vec![r.mu1, r.mu2], mu0: r.mu0 }
    }
}

/// State of the symmetric problem. Only P1 and P2 are stored; the mirror
/// bodies sit at P3 = -P1 and P4 = -P2 and the central body at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarState {
    pub t: f64,
    pub r1: Vec2,
    pub r2: Vec2,
    pub v1: Vec2,
    pub v2: Vec2,
}

impl PlanarState {
    /// The four moving bodies as independent particles.
    pub fn expand(&self) -> FullState {
        FullState {
            t: self.t,
            pos: [self.r1, self.r2, -self.r1, -self.r2],
            vel: [self.v1, self.v2, -self.v1, -self.v2],
        }
    }
}

/// State of the general four-body problem; index k holds body P(k+1).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FullState {
    pub t: f64,
    pub pos: [Vec2; 4],
    pub vel: [Vec2; 4],
}

impl FullState {
    pub fn center_of_mass(&self, masses: &[f64; 4]) -> (Vec2, Vec2) {
        let m: f64 = masses.iter().sum();
        let mut r = Vec2::ZERO;
        let mut v = Vec2::ZERO;
        for k in 0..4 {
            r += self.pos[k] * masses[k];
            v += self.vel[k] * masses[k];
        }
        (r * (1.0 / m), v * (1.0 / m))
    }

    /// Shifts to the barycentric frame.
    pub fn recenter(&mut self, masses: &[f64; 4]) {
        let (r, v) = self.center_of_mass(masses);
        for k in 0..4 {
            self.pos[k] -= r;
            self.vel[k] -= v;
        }
    }
}

/// Hierarchy state: which bodies form the inner binaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hierarchy {
    H12,
    H14,
    H13,
    H24,
    Undetermined,
}

impl Hierarchy {
    pub const DETERMINED: [Hierarchy; 4] = [Hierarchy::H12, Hierarchy::H13, Hierarchy::H14, Hierarchy::H24];

    pub fn label(self) -> &'static str {
        match self {
            Hierarchy::H12 => "12",
            Hierarchy::H14 => "14",
            Hierarchy::H13 => "13",
            Hierarchy::H24 => "24",
            Hierarchy::Undetermined => "--",
        }
    }
}

impl std::fmt::Display for Hierarchy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Energy bookkeeping in the sign convention of the Szebehely constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum {
    /// Negative of the total energy.
    pub e0: f64,
    /// Scalar angular momentum.
    pub c: f64,
    /// c² E0 with G = M = 1.
    pub c0: f64,
}

impl EnergyMomentum {
    pub fn from_parts(kinetic: f64, potential: f64, c: f64) -> Self {
        let e0 = potential - kinetic;
        EnergyMomentum { e0, c, c0: c * c * e0 }
    }
}

/// Force function Σ m_i m_j / r_ij over all pairs. Coincident bodies are
/// reported with 1-based indices.
pub fn potential(positions: &[Vec2], masses: &[f64]) -> Result<f64> {
    if positions.len() != masses.len() {
        return Err(Error::domain("positions and masses differ in length"));
    }
    let mut u = 0.0;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let r = (positions[i] - positions[j]).norm();
            if r == 0.0 || !r.is_finite() {
                return Err(Error::Coincident(i + 1, j + 1));
            }
            u += masses[i] * masses[j] / r;
        }
    }
    Ok(u)
}

/// Potential of the symmetric five-body system in terms of P1 and P2.
pub fn potential_cs5bp(r1: Vec2, r2: Vec2, ratios: &MassRatios) -> Result<f64> {
    let (m0, m1, m2) = (ratios.mu0, ratios.mu1, ratios.mu2);
    let d1 = r1.norm();
    let d2 = r2.norm();
    let d12 = (r1 - r2).norm();
    let d14 = (r1 + r2).norm();
    // P1 with its own mirror P3 and P2 with P4
    if d1 == 0.0 {
        return Err(Error::Coincident(1, 3));
    }
    if d2 == 0.0 {
        return Err(Error::Coincident(2, 4));
    }
    if d12 == 0.0 {
        return Err(Error::Coincident(1, 2));
    }
    if d14 == 0.0 {
        return Err(Error::Coincident(1, 4));
    }
    Ok(0.5 * (m1 * m1 / d1 + m2 * m2 / d2)
        + 2.0 * m1 * m2 * (1.0 / d12 + 1.0 / d14)
        + 2.0 * m0 * (m1 / d1 + m2 / d2))
}

/// Energy and angular momentum of a symmetric state. The central body is
/// at rest and carries no kinetic energy.
pub fn energy_and_momentum(state: &PlanarState, ratios: &MassRatios) -> Result<EnergyMomentum> {
    let u = potential_cs5bp(state.r1, state.r2, ratios)?;
    let t = ratios.mu1 * state.v1.norm2() + ratios.mu2 * state.v2.norm2();
    let c = 2.0 * (ratios.mu1 * state.r1.cross(state.v1) + ratios.mu2 * state.r2.cross(state.v2));
    Ok(EnergyMomentum::from_parts(t, u, c))
}

/// Energy and angular momentum of a general four-body state.
pub fn energy_and_momentum_full(state: &FullState, masses: &[f64; 4]) -> Result<EnergyMomentum> {
    let u = potential(&state.pos, masses)?;
    let mut t = 0.0;
    let mut c = 0.0;
    for k in 0..4 {
        t += 0.5 * masses[k] * state.vel[k].norm2();
        c += masses[k] * state.pos[k].cross(state.vel[k]);
    }
    Ok(EnergyMomentum::from_parts(t, u, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_constraint() {
        assert!(MassRatios::new(0.2, 0.2, 0.2).is_ok());
        assert!(MassRatios::new(0.01, 0.22475, 0.22475).is_err());
        assert!(MassRatios::new(0.01, 0.2475, 0.2475).is_ok());
        assert!(MassRatios::new(-0.1, 0.3, 0.25).is_err());
    }

    #[test]
    fn single_pair_potential() {
        let u = potential(&[Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)], &[1.0, 1.0]).unwrap();
        assert_eq!(u, 1.0);
    }

    #[test]
    fn coincident_pair_named() {
        let p = [Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)];
        match potential(&p, &[1.0; 3]) {
            Err(Error::Coincident(2, 3)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn at_rest_energy_is_minus_potential() {
        let r = MassRatios::equal_cs5bp();
        let s = PlanarState { r1: Vec2::new(1.0, 0.0), r2: Vec2::new(0.3, 0.7), ..Default::default() };
        let em = energy_and_momentum(&s, &r).unwrap();
        let u = potential_cs5bp(s.r1, s.r2, &r).unwrap();
        assert_eq!(em.e0, u);
        assert_eq!(em.c, 0.0);
    }
}
