use fatflat::profiles::*;
use fatflat::Error;
use proptest::prelude::*;

/// Composite five-point Gauss-Legendre rule.
fn gauss5(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let x = [0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
    let w = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let mut s = w[0] * f(c);
        for i in 1..3 {
            s += w[i] * (f(c - 0.5 * h * x[i]) + f(c + 0.5 * h * x[i]));
        }
        acc += 0.5 * h * s;
    }
    acc
}

// composite Gauss, 2 x 10^4 panels; the 10^4-panel value differs by 5e-14
const F18_TOTAL: f64 = 7.991_888_691_025_463;

#[test]
fn bump_total_matches_gauss_oracle() {
    let spec = BumpSpec::with_k(18.0).unwrap();
    let oracle = gauss5(&|x| spec.f(x), -18.0, 18.0, 20_000);
    assert!((oracle - F18_TOTAL).abs() < 1e-15);
    let bump = Bump::new(spec);
    assert!((bump.total().unwrap() - F18_TOTAL).abs() < 1e-12);
    assert!((bump_integral(&bump, 18.0).unwrap() - F18_TOTAL).abs() < 1e-12);
    assert!((bump_integral(&bump, 0.0).unwrap() - F18_TOTAL / 2.0).abs() < 1e-12);
    assert_eq!(bump_integral(&bump, -18.0).unwrap(), 0.0);
    let step = SmoothStep::new(spec).unwrap();
    assert!((step.total() - F18_TOTAL).abs() < 1e-12);
}

#[test]
fn bump_values() {
    let spec = BumpSpec::with_k(18.0).unwrap();
    assert!((bump_f(&spec, 0.0) - (-1f64).exp()).abs() < 1e-16);
    assert_eq!(bump_f(&spec, 18.0), 0.0);
    assert!((bump_f(&spec, 9.0) - (-4.0f64 / 3.0).exp()).abs() < 1e-16);
    assert!(matches!(
        BumpSpec::with_k(0.5),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn default_profile_passes_all_checks() {
    let profile = WarpingProfile::interpolated(DEFAULT_K).unwrap();
    let report = verify_profile(&profile, 60.0, 1e-3).unwrap();
    assert_eq!(report.checks.len(), 7);
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, PROFILE_CHECK_NAMES);
    assert!(report.all_passed(), "{report:?}");
    assert!(boundary_match(&profile, 60.0, 1e-3).max() <= 1e-12);

    let hyperbolic = verify_profile(&WarpingProfile::Hyperbolic, 60.0, 1e-3).unwrap();
    assert!(hyperbolic.all_passed());
}

#[test]
fn boundary_pieces() {
    let profile = WarpingProfile::interpolated(19.0).unwrap();
    let inner = profile.sigma_tau(0.02).unwrap();
    assert_eq!((inner.sigma, inner.tau), (0.02, 1.0));
    let outer = profile.sigma_tau(40.0).unwrap();
    assert_eq!((outer.sigma, outer.tau), (40f64.sinh(), 40f64.cosh()));
    let h = WarpingProfile::Hyperbolic.sigma_tau(1.0).unwrap();
    assert!((h.sigma - 1.175_201_193_643_801_4).abs() < 1e-15);
    assert!((h.tau - 1.543_080_634_815_243_7).abs() < 1e-15);
    assert_eq!(
        profile.sigma_tau(-1.0).unwrap_err(),
        Error::NegativeRadius(-1.0)
    );

    let step = WarpingProfile::interpolated(18.0).unwrap();
    assert_eq!(step.rho(0.05), (0.0, 0.0, 0.0));
    assert_eq!(step.rho(40.0), (1.0, 0.0, 0.0));
    assert!((step.rho(18.0 + 1.0 / 18.0).0 - 0.5).abs() < 1e-12);
}

#[test]
fn small_k_convexity_margin() {
    // k = 2 already satisfies every inequality
    let two = verify_profile(&WarpingProfile::interpolated(2.0).unwrap(), 20.0, 1e-4).unwrap();
    assert!(two.all_passed(), "{two:?}");

    // k = 1 fails; the grid minimizer agrees with a dense scan
    let one = WarpingProfile::interpolated(1.0).unwrap();
    let report = verify_profile(&one, 20.0, 1e-4).unwrap();
    let check = report.check("rho'' + rho >= 0").unwrap();
    assert!(!check.passed);
    let (mut best, mut at) = (f64::INFINITY, 0.0);
    for i in 0..=2_000_000u32 {
        let r = 1.0 + i as f64 * 1e-6;
        let (p, _, ddp) = one.rho(r);
        if p + ddp < best {
            best = p + ddp;
            at = r;
        }
    }
    assert!(
        (check.worst_location - at).abs() <= 1e-4,
        "{} vs {at}",
        check.worst_location
    );
    assert!((check.worst_value - best).abs() <= 1e-6 * best.abs());
}

proptest! {
    #[test]
    fn rho_is_a_monotone_step(k in 1.0f64..30.0, a in 0.0f64..80.0, b in 0.0f64..80.0) {
        let profile = WarpingProfile::interpolated(k).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let (p_lo, p_hi) = (profile.rho(lo).0, profile.rho(hi).0);
        prop_assert!((0.0..=1.0).contains(&p_lo) && (0.0..=1.0).contains(&p_hi));
        prop_assert!(p_lo <= p_hi + 1e-12);
    }

    #[test]
    fn cumulative_integral_is_monotone(a in -20.0f64..20.0, b in -20.0f64..20.0) {
        let bump = Bump::new(BumpSpec::with_k(18.0).unwrap());
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(bump_integral(&bump, lo).unwrap() <= bump_integral(&bump, hi).unwrap() + 1e-12);
    }

    #[test]
    fn derivatives_match_central_differences(r in 0.0f64..1.0) {
        let profile = WarpingProfile::interpolated(19.0).unwrap();
        let big_r = profile.matching_radius();
        let r = 1.0 / (2.0 * big_r) + r * (2.0 * big_r - 1.0 / (2.0 * big_r));
        let h = 1e-5;
        let (m, p) = (profile.sigma_tau(r - h).unwrap(), profile.sigma_tau(r + h).unwrap());
        let j = profile.sigma_tau(r).unwrap();
        let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1.0);
        prop_assert!(rel((p.sigma - m.sigma) / (2.0 * h), j.dsigma) < 1e-5);
        prop_assert!(rel((p.tau - m.tau) / (2.0 * h), j.dtau) < 1e-5);
        prop_assert!(rel((p.dsigma - m.dsigma) / (2.0 * h), j.ddsigma) < 1e-5);
        prop_assert!(rel((p.dtau - m.dtau) / (2.0 * h), j.ddtau) < 1e-5);
    }
}
