use approx::assert_abs_diff_eq;
use caledonia::szebehely::{
    axis, boundary_rho, c_crit_surface, c_e, c_surface, csfbp_alternate, csnbp_c_bounds, ladder,
    project_max_extensions, regime, sundman_a, Regime,
};
use caledonia::{Hierarchy, MassRatios, MassVector};
use proptest::prelude::*;

#[test]
fn equal_cs5bp_ladder() {
    let l = ladder(&MassRatios::equal_cs5bp()).unwrap();
    assert_abs_diff_eq!(l.r1, 0.0392219336, epsilon = 1e-9);
    assert_abs_diff_eq!(l.r2, l.r1, epsilon = 1e-12);
    assert_abs_diff_eq!(l.r3, 0.0655513662, epsilon = 1e-9);
    assert_abs_diff_eq!(l.r4, l.r3, epsilon = 1e-12);
    assert_abs_diff_eq!(l.argmins[3], 0.47168468, epsilon = 1e-6);
    assert_abs_diff_eq!(l.c_crit, l.r3.max(l.r4), epsilon = 0.0);
}

#[test]
fn light_pair_ladder() {
    let l = ladder(&MassRatios::new(0.01, 0.01, 0.485).unwrap()).unwrap();
    assert_abs_diff_eq!(l.r1, 0.009686761, epsilon = 1e-9);
    assert_abs_diff_eq!(l.r4, 0.01073865, epsilon = 1e-8);
}

#[test]
fn regimes_follow_the_rungs() {
    let l = ladder(&MassRatios::new(0.15, 0.15, 0.275).unwrap()).unwrap();
    assert_eq!(regime(0.02, &l), Regime::FullyConnected);
    assert_eq!(regime(0.04, &l), Regime::CentralHole);
    assert_eq!(regime(0.06, &l), Regime::OneHierarchyStable(Hierarchy::H24));
    assert_eq!(regime(0.07, &l), Regime::FullyDisconnected);
}

#[test]
fn alternate_normalization() {
    assert_abs_diff_eq!(csfbp_alternate(0.1, 1.0), 0.4, epsilon = 1e-15);
}

#[test]
fn boundary_roots_bracket_the_double_root() {
    let r = MassRatios::equal_cs5bp();
    let (y1, y2, x12) = (1.0, 0.6, 0.9);
    let c = c_surface(y1, y2, x12, &r).unwrap();
    assert_eq!(boundary_rho(y1, y2, x12, c, &r).unwrap().len(), 1);
    assert_eq!(boundary_rho(y1, y2, x12, 0.5 * c, &r).unwrap().len(), 2);
    assert!(boundary_rho(y1, y2, x12, 1.01 * c, &r).unwrap().is_empty());
    // at C0 = 0 the inner root is the origin and the outer one is A/E0-scaled
    let roots = boundary_rho(y1, y2, x12, 0.0, &r).unwrap();
    assert_abs_diff_eq!(roots[0], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(roots[1], sundman_a(y1, y2, x12, &r).unwrap(), epsilon = 1e-12);
}

#[test]
fn kinematics_are_checked() {
    let r = MassRatios::equal_cs5bp();
    assert!(c_surface(1.0, 0.5, 2.0, &r).is_err());
    assert!(c_surface(1.0, 1.0, 0.0, &r).is_err());
    assert!(c_e(1.0, &r).is_err());
}

#[test]
fn projections_split_at_the_neck() {
    let r = MassRatios::equal_cs5bp();
    let l = ladder(&r).unwrap();
    // between R1 and R3 both arms are open: one piece per sign and half
    let open = project_max_extensions(&r, 0.5 * (l.r1 + l.r3), 200).unwrap();
    assert!(open.iter().all(|c| c.segment == 0));
    // above C_crit each curve breaks at the neck
    let closed = project_max_extensions(&r, 1.02 * l.c_crit, 200).unwrap();
    assert!(closed.iter().any(|c| c.segment == 1));
    for c in &closed {
        for p in &c.points {
            assert!(p[1] >= 0.0 && p[2] >= 0.0);
        }
    }
    assert!(project_max_extensions(&r, 0.03, 1).is_err());
}

#[test]
fn surface_slice_maximum() {
    let mu0s = axis(0.15, 0.22, 0.005);
    let best = mu0s
        .iter()
        .map(|&m0| (m0, ladder(&MassRatios::from_mu0_mu1(m0, 0.25 * (1.0 - m0)).unwrap()).unwrap().c_crit))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert_abs_diff_eq!(best.1, 0.0656662, epsilon = 1e-7);
    assert_abs_diff_eq!(best.0, 0.184, epsilon = 0.0051);
    let surf = c_crit_surface(&[0.185], &axis(0.15, 0.25, 0.005)).unwrap();
    assert_abs_diff_eq!(surf.argmax.c_crit, 0.0659445, epsilon = 1e-7);
}

#[test]
fn mass_vector_normalization() {
    assert!(MassVector::new(vec![0.25, 0.25], 0.0).is_ok());
    assert!(MassVector::new(vec![0.25, 0.3], 0.0).is_err());
    assert!(MassVector::new(vec![], 1.0).is_err());
}

proptest! {
    #[test]
    fn two_pair_bounds_are_the_extreme_shapes(
        mu0 in 0.0f64..0.8,
        share in 0.1f64..0.9,
        y2 in 0.05f64..0.95,
        t in 0.01f64..0.99,
    ) {
        let mu1 = 0.5 * (1.0 - mu0) * share;
        let r = MassRatios::from_mu0_mu1(mu0, mu1).unwrap();
        let m = MassVector::from(r);
        let (lo, hi) = csnbp_c_bounds(&m, &[1.0, y2]).unwrap();
        // perpendicular pairs give the lower bound, collinear the upper one
        let perp = c_surface(1.0, y2, (1.0 + y2 * y2).sqrt(), &r).unwrap();
        let line = c_surface(1.0, y2, 1.0 - y2, &r).unwrap();
        prop_assert!((lo - perp).abs() < 1e-12 * perp);
        prop_assert!((hi - line).abs() < 1e-10 * line);
        let x12 = (1.0 - y2) + t * ((1.0 + y2) - (1.0 - y2));
        let c = c_surface(1.0, y2, x12, &r).unwrap();
        prop_assert!(c >= lo * (1.0 - 1e-12) && c <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn pair_swap_mirrors_the_ladder(mu0 in 0.0f64..0.9, share in 0.05f64..0.95) {
        let r = MassRatios::from_mu0_mu1(mu0, 0.5 * (1.0 - mu0) * share).unwrap();
        let l = ladder(&r).unwrap();
        prop_assert_eq!(l.c_crit, l.r3.max(l.r4));
        // swapping the pairs swaps primed and unprimed rungs
        let s = ladder(&MassRatios::new(r.mu0, r.mu2, r.mu1).unwrap()).unwrap();
        prop_assert!((s.r1 - l.r2).abs() < 1e-9 && (s.r3 - l.r4).abs() < 1e-9);
    }
}
