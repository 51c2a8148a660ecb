use subsonic_core::critical::{find_critical, margin_curve, CriticalError, CriticalSetup};
use subsonic_core::elliptic::ContinuationConfig;
use subsonic_core::farfield::BernoulliProfile;
use subsonic_core::gas::GasLaw;
use subsonic_core::geometry::{build_nozzle, NozzleGeometry, NozzleSpec};

fn setup(nozzle: NozzleGeometry) -> CriticalSetup {
    CriticalSetup {
        gas: GasLaw::polytropic(0.5, 2.0).unwrap(),
        profile: BernoulliProfile::constant(1.5).unwrap(),
        nozzle,
        continuation: ContinuationConfig {
            n_xi: 41,
            n_eta: 9,
            l0: 4.0,
            l_max: 8.0,
            ..ContinuationConfig::default()
        },
        eps0_scale: 0.05,
    }
}

#[test]
fn bracket_does_not_depend_on_start() {
    let s = setup(NozzleGeometry::straight());
    let a = find_critical(&s, Some(0.2), 0.01).unwrap();
    let b = find_critical(&s, Some(0.7), 0.01).unwrap();
    for r in [&a, &b] {
        assert!(
            r.m_lo < 1.0 && 1.0 <= r.m_hi && r.m_hi - r.m_lo <= 0.01,
            "{r:?}"
        );
        let lo = r.curve.samples.iter().find(|x| x.m == r.m_lo).unwrap();
        assert!(lo.accepted && lo.converged && !lo.truncation_active && lo.margin < 0.0);
        let hi = r.curve.samples.iter().find(|x| x.m == r.m_hi).unwrap();
        assert!(hi.rejected());
    }
    assert!((a.m_lo - b.m_lo).abs() <= 0.01 && (a.m_hi - b.m_hi).abs() <= 0.01);
}

#[test]
fn accepted_strip_samples_are_uniform_flow() {
    let s = setup(NozzleGeometry::straight());
    let curve = margin_curve(&s, &[0.3, 0.6, 0.9, 0.97]).unwrap();
    for x in &curve.samples {
        assert!(x.accepted);
        assert!((x.margin - (x.m * x.m - 1.0)).abs() < 1e-8);
    }
    // 0.97² - 1 lies inside the initial cutoff band, so ε was refined.
    assert!(curve.samples[3].eps < 0.05);
    assert_eq!(curve.bracket, None);
}

#[test]
fn widening_nozzle_chokes_at_narrow_end() {
    let nozzle = build_nozzle(&NozzleSpec::TanhTransition {
        center: 0.0,
        steepness: 1.0,
        lower: [0.0, 0.0],
        upper: [1.0, 2.0],
    })
    .unwrap();
    let r = find_critical(&setup(nozzle), Some(0.5), 0.02).unwrap();
    // ∫ρq over the narrowest section cannot exceed width · Σ(3/2) = 1.
    assert!(r.m_lo <= 1.0 + 0.02, "{r:?}");
    assert!(r.m_hi - r.m_lo <= 0.02);
}

#[test]
fn infeasible_start_is_reported() {
    let mut s = setup(NozzleGeometry::straight());
    s.continuation.solver.max_iter = 1;
    let nozzle = build_nozzle(&NozzleSpec::TanhTransition {
        center: 0.0,
        steepness: 1.0,
        lower: [0.0, 0.0],
        upper: [1.0, 2.0],
    })
    .unwrap();
    s.nozzle = nozzle;
    assert!(matches!(
        find_critical(&s, Some(0.5), 0.01),
        Err(CriticalError::Infeasible { .. })
    ));
}
