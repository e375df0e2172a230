use approx::assert_abs_diff_eq;
use caledonia::dynamics::{
    accel_cs5bp, accel_general4, detect_hierarchy, init_velocities, initial_state, integrate, integrate_observed,
    HierarchyRegions, IntegratorConfig, Mode, Monitors, OrbitState, Terminal,
};
use caledonia::szebehely::c_surface;
use caledonia::{energy_and_momentum, Error, FullState, Hierarchy, MassRatios, PlanarState, Vec2};
use proptest::prelude::*;

#[test]
fn initial_state_carries_the_requested_constants() {
    let r = MassRatios::new(0.2, 0.15, 0.25).unwrap();
    let s = initial_state(1.2, 0.7, 0.04, 0.2, &r, Mode::Cs5bp, 0.0).unwrap();
    let OrbitState::Cs5bp(p) = s else { panic!() };
    let em = energy_and_momentum(&p, &r).unwrap();
    assert_abs_diff_eq!(em.e0, 0.2, epsilon = 1e-14);
    assert_abs_diff_eq!(em.c0, 0.04, epsilon = 1e-14);
    // velocities are perpendicular to the radius vectors
    assert_eq!(p.v1.x, 0.0);
    assert_eq!(p.v2.x, 0.0);
}

#[test]
fn zero_angular_momentum_branch() {
    let r = MassRatios::equal_cs5bp();
    let (v1, v2) = init_velocities(1.0, 0.5, 0.0, 0.2, &r, Mode::Cs5bp).unwrap();
    let p = PlanarState { t: 0.0, r1: Vec2::new(1.0, 0.0), r2: Vec2::new(0.5, 0.0), v1, v2 };
    let em = energy_and_momentum(&p, &r).unwrap();
    assert_abs_diff_eq!(em.c, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(em.e0, 0.2, epsilon = 1e-14);
}

#[test]
fn forbidden_starts_match_the_boundary() {
    // a collinear start is allowed iff the Sundman quadratic is non-positive
    let r = MassRatios::equal_csfbp();
    let (c0, e0) = (0.038, 0.2);
    for i in 1..30 {
        for j in 1..30 {
            let (x1, x2) = (0.1 * i as f64, 0.1 * j as f64 + 0.05);
            let rn = x1.max(x2);
            let (y1, y2) = (x1 / rn, x2 / rn);
            let c = c_surface(y1, y2, (y1 - y2).abs(), &r).unwrap();
            let s = r.mu1 * y1 * y1 + r.mu2 * y2 * y2;
            let rho = e0 * rn;
            let q = rho * rho - (c / s).sqrt() * rho + c0 / (4.0 * s);
            let got = init_velocities(x1, x2, c0, e0, &r, Mode::General4);
            if q > 1e-12 {
                assert!(matches!(got, Err(Error::Forbidden(_))), "({x1}, {x2}) q={q}");
            } else if q < -1e-12 {
                assert!(got.is_ok(), "({x1}, {x2}) q={q}");
            }
        }
    }
}

#[test]
fn bad_inputs_are_domain_errors() {
    let r = MassRatios::equal_cs5bp();
    assert!(init_velocities(-1.0, 0.5, 0.03, 0.2, &r, Mode::Cs5bp).unwrap_err().is_domain());
    assert!(init_velocities(1.0, 0.5, 0.03, 0.0, &r, Mode::Cs5bp).unwrap_err().is_domain());
    assert!(init_velocities(1.0, 0.5, 0.03, 0.2, &r, Mode::General4).unwrap_err().is_domain());
    let cfg = IntegratorConfig { rel_tol: -1.0, ..Default::default() };
    let s = initial_state(1.0, 0.5, 0.03, 0.2, &r, Mode::Cs5bp, 0.0).unwrap();
    assert!(integrate(&s, &r, &cfg, &Monitors::default()).is_err());
}

#[test]
fn reduced_field_is_the_symmetric_slice() {
    let r = MassRatios::new(0.0, 0.2, 0.3).unwrap();
    let p = PlanarState { t: 0.0, r1: Vec2::new(0.9, 0.3), r2: Vec2::new(-0.2, 1.1), ..Default::default() };
    let (a1, a2) = accel_cs5bp(&p, &r).unwrap();
    let full = accel_general4(&p.expand(), &r.pair_masses()).unwrap();
    assert_abs_diff_eq!((a1 - full[0]).norm(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!((a2 - full[1]).norm(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!((a1 + full[2]).norm(), 0.0, epsilon = 1e-14);
}

#[test]
fn coincident_start_is_a_collision() {
    let r = MassRatios::equal_csfbp();
    let s = OrbitState::Cs5bp(PlanarState { t: 0.0, r1: Vec2::new(1.0, 0.0), r2: Vec2::new(1.0, 0.0), ..Default::default() });
    let out = integrate(&s, &r, &IntegratorConfig::default(), &Monitors::default());
    assert!(matches!(out, Err(Error::Coincident(1, 2))) || matches!(out, Ok(ref o) if matches!(o.terminal, Terminal::Collision { pair: [1, 2], .. })));
}

#[test]
fn no_changes_above_the_critical_constant() {
    let r = MassRatios::equal_cs5bp();
    let regions = HierarchyRegions::new(&r, 0.07, 0.2).unwrap();
    let mon = Monitors { regions: Some(regions), ..Default::default() };
    let cfg = IntegratorConfig { max_steps: 3000, ..Default::default() };
    let mut ran = 0;
    for (x1, x2) in [(0.3, 1.5), (2.1, 0.5), (1.5, 0.25), (0.9, 2.25)] {
        if let Ok(s) = initial_state(x1, x2, 0.07, 0.2, &r, Mode::Cs5bp, 0.0) {
            let out = integrate(&s, &r, &cfg, &mon).unwrap();
            assert!(out.hierarchy_changes.is_empty(), "({x1}, {x2}): {:?}", out.hierarchy_changes);
            ran += 1;
        }
    }
    assert!(ran > 0);
}

#[test]
fn change_log_follows_the_labels() {
    // low C0: the arms are connected and orbits do swap partners
    let r = MassRatios::equal_csfbp();
    let regions = HierarchyRegions::new(&r, 0.01, 0.2).unwrap();
    let mon = Monitors { regions: Some(regions), ..Default::default() };
    let cfg = IntegratorConfig { max_steps: 5000, ..Default::default() };
    let mut total = 0;
    for j in 1..=10 {
        let Ok(s) = initial_state(1.2, 0.25 * j as f64, 0.01, 0.2, &r, Mode::Cs5bp, 0.0) else { continue };
        let mut seen = Vec::new();
        let out = integrate_observed(&s, &r, &cfg, &mon, &mut |smp| {
            if let OrbitState::Cs5bp(p) = smp.state {
                assert_eq!(detect_hierarchy(&p, &regions), smp.hierarchy);
            }
            if smp.hierarchy != Hierarchy::Undetermined && seen.last() != Some(&smp.hierarchy) {
                seen.push(smp.hierarchy);
            }
        })
        .unwrap();
        let expect = seen.len().saturating_sub(1);
        assert_eq!(out.hierarchy_changes.len(), expect);
        for (c, w) in out.hierarchy_changes.iter().zip(seen.windows(2)) {
            assert_eq!((c.from, c.to), (w[0], w[1]));
        }
        total += expect;
    }
    assert!(total > 0);
}

#[test]
fn general_mode_conserves_momentum_and_symmetry() {
    let r = MassRatios::equal_csfbp();
    let s = initial_state(1.1, 0.45, 0.038, 0.2, &r, Mode::General4, 0.0).unwrap();
    let out = integrate(&s, &r, &IntegratorConfig { max_steps: 2000, ..Default::default() }, &Monitors::default()).unwrap();
    assert!(out.angmom_drift < 1e-9);
    let f = out.final_state.full();
    let (_, p) = f.center_of_mass(&r.pair_masses());
    assert!(p.norm() < 1e-12);
    match out.terminal {
        Terminal::Completed => {
            assert!(out.energy_drift <= 1e-9);
            assert!(caledonia::dynamics::symmetry_defect(&f) < 1e-4);
        }
        // the energy monitor is what flags a close encounter
        Terminal::Collision { .. } => assert!(out.energy_drift > 1e-9),
        Terminal::SymmetryBroken { .. } => assert!(caledonia::dynamics::symmetry_defect(&f) > 1e-4),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newtons_third_law(
        xs in prop::array::uniform8(-3.0f64..3.0),
        m in prop::array::uniform4(0.05f64..1.0),
    ) {
        let pos = [Vec2::new(xs[0], xs[1]), Vec2::new(xs[2], xs[3]), Vec2::new(xs[4], xs[5]), Vec2::new(xs[6], xs[7])];
        for i in 0..4 {
            for j in i + 1..4 {
                prop_assume!((pos[i] - pos[j]).norm() > 0.05);
            }
        }
        let st = FullState { t: 0.0, pos, vel: [Vec2::default(); 4] };
        let a = accel_general4(&st, &m).unwrap();
        let net = (0..4).fold(Vec2::default(), |acc, k| acc + a[k] * m[k]);
        let scale: f64 = (0..4).map(|k| m[k] * a[k].norm()).sum();
        prop_assert!(net.norm() <= 1e-12 * scale.max(1.0));
        // no net torque either
        let tq: f64 = (0..4).map(|k| m[k] * pos[k].cross(a[k])).sum();
        prop_assert!(tq.abs() <= 1e-11 * scale.max(1.0));
    }
}
