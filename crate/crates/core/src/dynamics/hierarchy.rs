//! Hierarchy labels from the (ρ1, ρ2) region partition.
//!
//! The partition is built from the necks of the maximum-extension
//! projections. Region I (ρ1 > ρ2 below the C_e neck direction) is the 24
//! binary, region III (ρ2 > ρ1 below the C_e′ neck) is the 13 binary,
//! region II between them is a double binary (12 or 14 by geometry) and
//! region IV, the disc around the origin out to the outer boundary at any
//! open neck, carries no label.

use serde::{Deserialize, Serialize};

use crate::common::{Hierarchy, MassRatios, PlanarState, Vec2};
use crate::szebehely::ladder;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyRegions {
    pub e0: f64,
    /// Neck direction y = ρ2/ρ1 in the ρ1 > ρ2 half (argmin of C_e).
    pub y_i: f64,
    /// Neck direction y = ρ1/ρ2 in the ρ2 > ρ1 half (argmin of C_e′).
    pub y_iii: f64,
    /// Radius of region IV in ρ_n; zero when both necks are closed.
    pub rho_j: f64,
}

fn outer_root(c: f64, s: f64, c0: f64) -> Option<f64> {
    (c >= c0).then(|| 0.5 * (c / s).sqrt() * (1.0 + (1.0 - c0 / c).sqrt()))
}

impl HierarchyRegions {
    pub fn new(r: &MassRatios, c0: f64, e0: f64) -> Result<Self> {
        if !(e0 > 0.0) {
            return Err(Error::domain("E0 must be positive"));
        }
        let l = ladder(r)?;
        let y_i = l.argmins[2];
        let y_iii = l.argmins[3];
        let rho_i = outer_root(l.r3, r.mu1 + r.mu2 * y_i * y_i, c0);
        let rho_iii = outer_root(l.r4, r.mu1 * y_iii * y_iii + r.mu2, c0);
        let rho_j = rho_i.unwrap_or(0.0).max(rho_iii.unwrap_or(0.0));
        Ok(HierarchyRegions { e0, y_i, y_iii, rho_j })
    }
}

/// Label of the instantaneous geometry of P1 and P2 (mirrors implied).
pub fn detect_hierarchy(state: &PlanarState, regions: &HierarchyRegions) -> Hierarchy {
    label(state.r1, state.r2, regions)
}

pub(crate) fn label(r1: Vec2, r2: Vec2, g: &HierarchyRegions) -> Hierarchy {
    let rho1 = g.e0 * r1.norm();
    let rho2 = g.e0 * r2.norm();
    if rho1.max(rho2) < g.rho_j {
        return Hierarchy::Undetermined;
    }
    if rho1 > rho2 && rho2 / rho1 < g.y_i {
        return Hierarchy::H24;
    }
    if rho2 > rho1 && rho1 / rho2 < g.y_iii {
        return Hierarchy::H13;
    }
    if (r1 - r2).norm() < (r1 + r2).norm() {
        Hierarchy::H12
    } else {
        Hierarchy::H14
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arm_labels() {
        let r = MassRatios::equal_cs5bp();
        let g = HierarchyRegions::new(&r, 0.07, 1.0).unwrap();
        assert_eq!(g.rho_j, 0.0);
        let s = |a: Vec2, b: Vec2| PlanarState { r1: a, r2: b, ..Default::default() };
        assert_eq!(detect_hierarchy(&s(Vec2::new(2.0, 0.0), Vec2::new(0.0, 0.1)), &g), Hierarchy::H24);
        assert_eq!(detect_hierarchy(&s(Vec2::new(0.1, 0.0), Vec2::new(0.0, 2.0)), &g), Hierarchy::H13);
        assert_eq!(detect_hierarchy(&s(Vec2::new(1.0, 0.0), Vec2::new(0.9, 0.1)), &g), Hierarchy::H12);
        assert_eq!(detect_hierarchy(&s(Vec2::new(1.0, 0.0), Vec2::new(-0.9, 0.1)), &g), Hierarchy::H14);
    }

    #[test]
    fn open_neck_makes_a_core() {
        let r = MassRatios::equal_cs5bp();
        let g = HierarchyRegions::new(&r, 0.03, 1.0).unwrap();
        assert!(g.rho_j > 0.0);
        let s = PlanarState { r1: Vec2::new(0.5 * g.rho_j, 0.0), r2: Vec2::new(0.0, 0.01), ..Default::default() };
        assert_eq!(detect_hierarchy(&s, &g), Hierarchy::Undetermined);
    }
}
