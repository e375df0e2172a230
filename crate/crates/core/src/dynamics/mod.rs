//! Equations of motion, velocity initialization, integration and monitors.
//!
//! Two modes share one integrator: the reduced symmetric five-body problem
//! (only P1 and P2 are integrated, mirrors and the central body implied)
//! and the general four-body problem with all bodies free.

pub mod hierarchy;
pub mod ias15;

use serde::{Deserialize, Serialize};

pub use crate::common::Hierarchy;
use crate::common::{
    energy_and_momentum, energy_and_momentum_full, potential_cs5bp, EnergyMomentum, FullState,
    MassRatios, PlanarState, Vec2,
};
use crate::{Error, Result};
pub use hierarchy::{detect_hierarchy, HierarchyRegions};
use ias15::{Field, Ias15};

/// Default mirror-sum threshold of the symmetry monitor.
pub const SYMMETRY_THRESHOLD: f64 = 1e-4;
/// Default relative energy error taken as a close encounter.
pub const ENERGY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General4,
    Cs5bp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum OrbitState {
    Cs5bp(PlanarState),
    General4(FullState),
}

impl OrbitState {
    pub fn t(&self) -> f64 {
        match self {
            OrbitState::Cs5bp(s) => s.t,
            OrbitState::General4(s) => s.t,
        }
    }

    /// P1 and P2 positions and velocities.
    pub fn pair(&self) -> (Vec2, Vec2, Vec2, Vec2) {
        match self {
            OrbitState::Cs5bp(s) => (s.r1, s.r2, s.v1, s.v2),
            OrbitState::General4(s) => (s.pos[0], s.pos[1], s.vel[0], s.vel[1]),
        }
    }

    pub fn full(&self) -> FullState {
        match self {
            OrbitState::Cs5bp(s) => s.expand(),
            OrbitState::General4(s) => *s,
        }
    }

    pub fn energy(&self, r: &MassRatios) -> Result<EnergyMomentum> {
        match self {
            OrbitState::Cs5bp(s) => energy_and_momentum(s, r),
            OrbitState::General4(s) => energy_and_momentum_full(s, &r.pair_masses()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Step-size control: target |b6| / |a| of the Radau expansion.
    pub rel_tol: f64,
    /// Floor added to |a| in the step-size control.
    pub abs_tol: f64,
    pub max_steps: u64,
    pub min_step: f64,
    /// Accepted steps between monitor evaluations.
    pub monitor_cadence: u64,
    /// Optional end time; integration stops exactly there.
    pub t_end: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 10_000,
            min_step: 1e-12,
            monitor_cadence: 1,
            t_end: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.min_step > 0.0) {
            return Err(Error::domain("tolerances and min_step must be positive"));
        }
        if self.monitor_cadence == 0 {
            return Err(Error::domain("monitor_cadence must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monitors {
    /// Region partition for hierarchy labels; no log without it.
    pub regions: Option<HierarchyRegions>,
    /// Symmetry-break test (general mode only).
    pub symmetry: bool,
    pub symmetry_threshold: f64,
    pub energy_threshold: f64,
}

impl Default for Monitors {
    fn default() -> Self {
        Monitors {
            regions: None,
            symmetry: true,
            symmetry_threshold: SYMMETRY_THRESHOLD,
            energy_threshold: ENERGY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Terminal {
    /// Close encounter of bodies P_i, P_j (1-based).
    Collision { pair: [u8; 2], t: f64 },
    SymmetryBroken { t: f64 },
    Completed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyChange {
    pub t: f64,
    pub from: Hierarchy,
    pub to: Hierarchy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitOutcome {
    pub terminal: Terminal,
    pub initial_hierarchy: Hierarchy,
    pub hierarchy_changes: Vec<HierarchyChange>,
    /// max |E(t) − E(0)| / |E(0)| over the monitor checks.
    pub energy_drift: f64,
    /// max |c(t) − c(0)| / |c(0)| (absolute when c(0) = 0).
    pub angmom_drift: f64,
    pub steps_taken: u64,
    pub final_state: OrbitState,
}

fn inv3(d: Vec2) -> f64 {
    let r2 = d.norm2();
    1.0 / (r2 * r2.sqrt())
}

fn cs5bp_acc(r1: Vec2, r2: Vec2, r: &MassRatios) -> Result<(Vec2, Vec2)> {
    let d12 = r1 - r2;
    let s = r1 + r2;
    for (d, pair) in [(r1, (1, 3)), (r2, (2, 4)), (d12, (1, 2)), (s, (1, 4))] {
        if d.norm2() == 0.0 {
            return Err(Error::Coincident(pair.0, pair.1));
        }
    }
    let (k12, ks) = (inv3(d12), inv3(s));
    let a1 = r1 * (-(r.mu0 + 0.25 * r.mu1) * inv3(r1)) - (d12 * k12 + s * ks) * r.mu2;
    let a2 = r2 * (-(r.mu0 + 0.25 * r.mu2) * inv3(r2)) - (-d12 * k12 + s * ks) * r.mu1;
    Ok((a1, a2))
}

/// Reduced accelerations of P1 and P2 in the symmetric five-body problem.
pub fn accel_cs5bp(state: &PlanarState, r: &MassRatios) -> Result<(Vec2, Vec2)> {
    cs5bp_acc(state.r1, state.r2, r)
}

/// Newtonian accelerations of four free bodies.
pub fn accel_general4(state: &FullState, masses: &[f64; 4]) -> Result<[Vec2; 4]> {
    let mut acc = [Vec2::ZERO; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            let d = state.pos[j] - state.pos[i];
            if d.norm2() == 0.0 {
                return Err(Error::Coincident(i + 1, j + 1));
            }
            let k = inv3(d);
            acc[i] += d * (masses[j] * k);
            acc[j] -= d * (masses[i] * k);
        }
    }
    Ok(acc)
}

/// y-velocities of P1 and P2 for a start on the positive x-axis with the
/// given Szebehely constant and energy −E0. The mirror bodies move
/// oppositely; the velocities are perpendicular to the radius vectors.
pub fn init_velocities(r1x: f64, r2x: f64, c0: f64, e0: f64, r: &MassRatios, mode: Mode) -> Result<(Vec2, Vec2)> {
    if !(r1x > 0.0 && r2x > 0.0) {
        return Err(Error::domain("start positions must be positive"));
    }
    if !(e0 > 0.0) || !(c0 >= 0.0) {
        return Err(Error::domain("need E0 > 0 and C0 >= 0"));
    }
    if !(r.mu1 > 0.0 && r.mu2 > 0.0) {
        return Err(Error::domain("both pairs need positive mass"));
    }
    if mode == Mode::General4 && r.mu0 != 0.0 {
        return Err(Error::domain("the general four-body mode has no central mass (mu0 must be 0)"));
    }
    let (m1, m2) = (r.mu1, r.mu2);
    let u = potential_cs5bp(Vec2::new(r1x, 0.0), Vec2::new(r2x, 0.0), r)?;
    let t = u - e0;
    let d = m1 * r1x * r1x + m2 * r2x * r2x;
    let c = (c0 / e0).sqrt();
    let radicand = m1 * m2 * (4.0 * d * t - c * c);
    if !(radicand >= 0.0) {
        return Err(Error::Forbidden(radicand));
    }
    let s = radicand.sqrt();
    let v1 = (r1x * c * m1 - r2x * s) / (2.0 * m1 * d);
    let v2 = (r2x * c * m2 + r1x * s) / (2.0 * m2 * d);
    Ok((Vec2::new(0.0, v1), Vec2::new(0.0, v2)))
}

/// Initial state for a grid point. In general mode `perturbation` shifts
/// P1 along x before the system is moved to its barycentric frame.
pub fn initial_state(
    r1x: f64,
    r2x: f64,
    c0: f64,
    e0: f64,
    r: &MassRatios,
    mode: Mode,
    perturbation: f64,
) -> Result<OrbitState> {
    let (v1, v2) = init_velocities(r1x, r2x, c0, e0, r, mode)?;
    let s = PlanarState { t: 0.0, r1: Vec2::new(r1x, 0.0), r2: Vec2::new(r2x, 0.0), v1, v2 };
    Ok(match mode {
        Mode::Cs5bp => OrbitState::Cs5bp(s),
        Mode::General4 => {
            let mut f = s.expand();
            f.pos[0].x += perturbation;
            f.recenter(&r.pair_masses());
            OrbitState::General4(f)
        }
    })
}

/// True when either pair's mirror sum exceeds the default threshold.
pub fn monitor_symmetry(s: &FullState) -> bool {
    symmetry_defect(s) > SYMMETRY_THRESHOLD
}

/// max over both pairs of |P1 + P3|², |P2 + P4|².
pub fn symmetry_defect(s: &FullState) -> f64 {
    (s.pos[0] + s.pos[2]).norm2().max((s.pos[1] + s.pos[3]).norm2())
}

/// True when the energy error exceeds `threshold` relative to |E(0)|.
pub fn monitor_collision(e_now: f64, e_initial: f64, threshold: f64) -> bool {
    let scale = if e_initial != 0.0 { e_initial.abs() } else { 1.0 };
    (e_now - e_initial).abs() > threshold * scale
}

/// Closest pair among the four moving bodies, 1-based.
pub fn nearest_pair(pos: &[Vec2; 4]) -> [u8; 2] {
    let mut best = (f64::INFINITY, [1, 2]);
    for i in 0..4 {
        for j in i + 1..4 {
            let d = (pos[i] - pos[j]).norm();
            if d < best.0 {
                best = (d, [i as u8 + 1, j as u8 + 1]);
            }
        }
    }
    best.1
}

struct Cs5bpField(MassRatios);

impl Field for Cs5bpField {
    fn dim(&self) -> usize {
        4
    }
    fn accel(&self, x: &[f64], a: &mut [f64]) -> Result<()> {
        let (a1, a2) = cs5bp_acc(Vec2::new(x[0], x[1]), Vec2::new(x[2], x[3]), &self.0)?;
        a.copy_from_slice(&[a1.x, a1.y, a2.x, a2.y]);
        Ok(())
    }
}

struct General4Field([f64; 4]);

impl Field for General4Field {
    fn dim(&self) -> usize {
        8
    }
    fn accel(&self, x: &[f64], a: &mut [f64]) -> Result<()> {
        let s = unpack_full(0.0, x, &[0.0; 8]);
        let acc = accel_general4(&s, &self.0)?;
        for k in 0..4 {
            a[2 * k] = acc[k].x;
            a[2 * k + 1] = acc[k].y;
        }
        Ok(())
    }
}

fn unpack_full(t: f64, x: &[f64], v: &[f64]) -> FullState {
    FullState {
        t,
        pos: std::array::from_fn(|k| Vec2::new(x[2 * k], x[2 * k + 1])),
        vel: std::array::from_fn(|k| Vec2::new(v[2 * k], v[2 * k + 1])),
    }
}

fn pack(state: &OrbitState) -> (Vec<f64>, Vec<f64>) {
    match state {
        OrbitState::Cs5bp(s) => (
            vec![s.r1.x, s.r1.y, s.r2.x, s.r2.y],
            vec![s.v1.x, s.v1.y, s.v2.x, s.v2.y],
        ),
        OrbitState::General4(s) => (
            s.pos.iter().flat_map(|p| [p.x, p.y]).collect(),
            s.vel.iter().flat_map(|p| [p.x, p.y]).collect(),
        ),
    }
}

fn unpack(like: &OrbitState, t: f64, x: &[f64], v: &[f64]) -> OrbitState {
    match like {
        OrbitState::Cs5bp(_) => OrbitState::Cs5bp(PlanarState {
            t,
            r1: Vec2::new(x[0], x[1]),
            r2: Vec2::new(x[2], x[3]),
            v1: Vec2::new(v[0], v[1]),
            v2: Vec2::new(v[2], v[3]),
        }),
        OrbitState::General4(_) => OrbitState::General4(unpack_full(t, x, v)),
    }
}

/// One observation handed to [`integrate_observed`] callbacks.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub state: OrbitState,
    pub em: EnergyMomentum,
    pub hierarchy: Hierarchy,
}

/// Integrates until a monitor fires, `max_steps` accepted steps or `t_end`.
pub fn integrate(state: &OrbitState, r: &MassRatios, cfg: &IntegratorConfig, mon: &Monitors) -> Result<OrbitOutcome> {
    integrate_observed(state, r, cfg, mon, &mut |_| {})
}

/// As [`integrate`], calling `observe` at the start and at every monitor
/// check.
pub fn integrate_observed(
    state: &OrbitState,
    r: &MassRatios,
    cfg: &IntegratorConfig,
    mon: &Monitors,
    observe: &mut dyn FnMut(&Sample),
) -> Result<OrbitOutcome> {
    cfg.validate()?;
    match state {
        OrbitState::Cs5bp(_) => run(&Cs5bpField(*r), state, r, cfg, mon, observe),
        OrbitState::General4(_) => {
            if r.mu0 != 0.0 {
                return Err(Error::domain("the general four-body mode has no central mass (mu0 must be 0)"));
            }
            run(&General4Field(r.pair_masses()), state, r, cfg, mon, observe)
        }
    }
}

fn run<F: Field>(
    field: &F,
    start: &OrbitState,
    r: &MassRatios,
    cfg: &IntegratorConfig,
    mon: &Monitors,
    observe: &mut dyn FnMut(&Sample),
) -> Result<OrbitOutcome> {
    let label = |s: &OrbitState| {
        mon.regions.as_ref().map_or(Hierarchy::Undetermined, |g| {
            let (r1, r2, _, _) = s.pair();
            hierarchy::label(r1, r2, g)
        })
    };
    let em0 = start.energy(r)?;
    let h0 = label(start);
    observe(&Sample { state: *start, em: em0, hierarchy: h0 });

    let (x, v) = pack(start);
    let mut integ = Ias15::new(field, start.t(), x, v, cfg.rel_tol, cfg.abs_tol, cfg.min_step)?;
    let mut last = (h0 != Hierarchy::Undetermined).then_some(h0);
    let mut changes = Vec::new();
    let mut energy_drift = 0.0f64;
    let mut angmom_drift = 0.0f64;
    let mut steps = 0u64;
    let mut terminal = Terminal::Completed;
    let mut current = *start;

    while steps < cfg.max_steps {
        if cfg.t_end.is_some_and(|te| integ.t >= te) {
            break;
        }
        match integ.step(field, cfg.t_end) {
            Ok(_) => steps += 1,
            Err(Error::Coincident(i, j)) => {
                terminal = Terminal::Collision { pair: [i as u8, j as u8], t: integ.t };
                break;
            }
            Err(Error::StepUnderflow(_)) => {
                let s = unpack(start, integ.t, &integ.x, &integ.v);
                terminal = Terminal::Collision { pair: nearest_pair(&s.full().pos), t: integ.t };
                break;
            }
            Err(e) => return Err(e),
        }
        current = unpack(start, integ.t, &integ.x, &integ.v);
        let at_end = steps == cfg.max_steps || cfg.t_end.is_some_and(|te| integ.t >= te);
        if steps % cfg.monitor_cadence != 0 && !at_end {
            continue;
        }
        let em = match current.energy(r) {
            Ok(em) => em,
            Err(Error::Coincident(i, j)) => {
                terminal = Terminal::Collision { pair: [i as u8, j as u8], t: integ.t };
                break;
            }
            Err(e) => return Err(e),
        };
        let de = ((em.e0 - em0.e0) / if em0.e0 != 0.0 { em0.e0.abs() } else { 1.0 }).abs();
        energy_drift = energy_drift.max(de);
        let dc = ((em.c - em0.c) / if em0.c != 0.0 { em0.c.abs() } else { 1.0 }).abs();
        angmom_drift = angmom_drift.max(dc);
        let h = label(&current);
        observe(&Sample { state: current, em, hierarchy: h });
        if monitor_collision(-em.e0, -em0.e0, mon.energy_threshold) {
            terminal = Terminal::Collision { pair: nearest_pair(&current.full().pos), t: integ.t };
            break;
        }
        if mon.symmetry {
            if let OrbitState::General4(f) = &current {
                if symmetry_defect(f) > mon.symmetry_threshold {
                    terminal = Terminal::SymmetryBroken { t: integ.t };
                    break;
                }
            }
        }
        if h != Hierarchy::Undetermined {
            if let Some(prev) = last {
                if prev != h {
                    changes.push(HierarchyChange { t: integ.t, from: prev, to: h });
                }
            }
            last = Some(h);
        }
    }
    Ok(OrbitOutcome {
        terminal,
        initial_hierarchy: h0,
        hierarchy_changes: changes,
        energy_drift,
        angmom_drift,
        steps_taken: steps,
        final_state: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_threshold_arithmetic() {
        let mut s = PlanarState { r1: Vec2::new(1.0, 0.0), r2: Vec2::new(0.5, 0.3), ..Default::default() }.expand();
        assert!(!monitor_symmetry(&s));
        s.pos[0].x += 0.011;
        assert!(monitor_symmetry(&s));
        s.pos[0].x -= 0.002;
        assert!(!monitor_symmetry(&s));
    }

    #[test]
    fn collision_monitor() {
        assert!(!monitor_collision(-1.0, -1.0, ENERGY_THRESHOLD));
        assert!(monitor_collision(-1.0 + 1e-6, -1.0, ENERGY_THRESHOLD));
        assert!(!monitor_collision(-1.0 + 1e-6, -1.0, 1e-5));
    }

    #[test]
    fn general_mode_rejects_central_mass() {
        let r = MassRatios::equal_cs5bp();
        assert!(init_velocities(1.0, 0.5, 0.01, 0.2, &r, Mode::General4).is_err());
    }
}
