use std::f64::consts::TAU;

use fatflat::flow::*;
use fatflat::geometry::{sample_rng, ChartKind, MetricChart};
use fatflat::profiles::WarpingProfile;
use fatflat::Error;
use rand::Rng;

fn interp() -> WarpingProfile {
    WarpingProfile::interpolated(19.0).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn flat_cartesian_geodesic_is_a_line() {
    let chart = MetricChart::cartesian(1, WarpingProfile::Flat).unwrap();
    let s = PhaseState::new(vec![0.1, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic(&chart, &s, 10.0, DEFAULT_STEP).unwrap();
    assert_eq!(path.samples.len(), 10_001);
    for sample in path.samples.iter().step_by(997) {
        assert!(max_diff(&sample.state.position, &[0.1, 0.0, sample.t]) < 1e-12);
    }
    assert!(path.samples.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn axis_is_a_geodesic_of_the_hyperbolic_metric() {
    let chart = MetricChart::cartesian(1, WarpingProfile::Hyperbolic).unwrap();
    let s = PhaseState::new(vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic_switching(&chart, &s, 5.0, DEFAULT_STEP).unwrap();
    assert!(path.samples.iter().all(|x| x.kind == ChartKind::Cartesian));
    assert!(max_diff(&path.end().state.position, &[0.0, 0.0, 5.0]) < 1e-12);
}

#[test]
fn flat_tube_orbit_keeps_its_radius() {
    let chart = MetricChart::cartesian(1, interp()).unwrap();
    let s = PhaseState::new(vec![0.01, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic(&chart, &s, 100.0, DEFAULT_STEP).unwrap();
    for sample in &path.samples {
        let p = &sample.state.position;
        assert!((p[0] - 0.01).abs() < 1e-15 && p[1].abs() < 1e-15);
    }
    assert!(
        (path.end().state.position[2] - 100.0).abs() < 1e-9,
        "{}",
        path.end().state.position[2]
    );
}

#[test]
fn fixed_polar_chart_reports_exit_near_axis() {
    let chart = MetricChart::polar(1, WarpingProfile::Hyperbolic).unwrap();
    let s = PhaseState::new(vec![0.5, 0.0, 0.0], vec![-1.0, 0.0, 0.0]);
    match integrate_geodesic(&chart, &s, 2.0, DEFAULT_STEP) {
        Err(Error::ChartExit { chart, t }) => {
            assert_eq!(chart, "polar");
            assert!((t - 0.49).abs() < 2e-3);
        }
        other => panic!("expected chart exit, got {other:?}"),
    }
    let switched = integrate_geodesic_switching(&chart, &s, 2.0, DEFAULT_STEP).unwrap();
    let end = switched.end_in_start_chart().unwrap();
    // straight through the axis: radius 1.5 on the opposite ray
    assert!((end.position[0] - 1.5).abs() < 1e-10);
    assert!((end.position[1].rem_euclid(TAU) - TAU / 2.0).abs() < 1e-10);
}

#[test]
fn four_d_model_has_no_switching() {
    let chart = MetricChart::four_d(interp());
    let s = PhaseState::new(vec![2.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]);
    assert!(matches!(
        integrate_geodesic_switching(&chart, &s, 1.0, DEFAULT_STEP),
        Err(Error::InvalidParameter(_))
    ));
    let path = integrate_geodesic(&chart, &s, 1.0, DEFAULT_STEP).unwrap();
    assert!(path.energy_drift().unwrap() < 1e-12);
}

#[test]
fn invalid_inputs_are_rejected() {
    let chart = MetricChart::polar(1, interp()).unwrap();
    let s = PhaseState::new(vec![2.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    assert!(integrate_geodesic(&chart, &s, 1.0, 0.0).is_err());
    assert!(integrate_geodesic(&chart, &s, -1.0, 1e-3).is_err());
    let bad = PhaseState::new(vec![2.0, 0.0], vec![0.0, 0.0, 1.0]);
    assert!(matches!(
        integrate_geodesic(&chart, &bad, 1.0, 1e-3),
        Err(Error::DimensionMismatch(2, 3))
    ));
}

fn random_state(chart: &MetricChart, index: u64) -> PhaseState {
    let mut rng = sample_rng(2024, index);
    let r = rng.gen_range(0.2..30.0);
    let theta = rng.gen_range(0.0..TAU);
    let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(
        chart,
        &PhaseState::new(vec![r, theta, rng.gen_range(-1.0..1.0)], v),
    )
    .unwrap()
}

#[test]
fn energy_is_conserved_on_random_orbits() {
    let chart = MetricChart::polar(1, interp()).unwrap();
    let states: Vec<PhaseState> = (0..6).map(|i| random_state(&chart, i)).collect();
    let t_end = 30.0;
    for path in integrate_many(&chart, &states, t_end, DEFAULT_STEP, ChartPolicy::Switching) {
        let drift = path.unwrap().energy_drift().unwrap();
        assert!(drift <= 1e-8 * (1.0 + t_end), "drift {drift:e}");
    }
}

#[test]
fn orbits_retrace_when_reversed() {
    let chart = MetricChart::polar(1, interp()).unwrap();
    for i in 0..4 {
        let s = random_state(&chart, 100 + i);
        let forward = integrate_geodesic_switching(&chart, &s, 20.0, DEFAULT_STEP).unwrap();
        let back = integrate_geodesic_switching(
            &chart,
            &forward.end_in_start_chart().unwrap().reversed(),
            20.0,
            DEFAULT_STEP,
        )
        .unwrap()
        .end_in_start_chart()
        .unwrap();
        assert!(max_diff(&back.position, &s.position) < 1e-6);
        assert!(max_diff(&back.velocity, &s.reversed().velocity) < 1e-6);
    }
}

#[test]
fn step_halving_is_fourth_order() {
    let chart = MetricChart::polar(1, interp()).unwrap();
    let s = normalize(
        &chart,
        &PhaseState::new(vec![0.8, 0.3, 0.0], vec![-0.9, 0.1, 0.5]),
    )
    .unwrap();
    let reference = integrate_geodesic_switching(&chart, &s, 10.0, 2e-3)
        .unwrap()
        .end_in_start_chart()
        .unwrap();
    let err = |h: f64| {
        let e = integrate_geodesic_switching(&chart, &s, 10.0, h)
            .unwrap()
            .end_in_start_chart()
            .unwrap();
        max_diff(&e.position, &reference.position)
    };
    let (coarse, fine) = (err(0.1), err(0.05));
    assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
}

#[test]
fn charts_agree_on_a_common_orbit() {
    let profile = interp();
    let polar = MetricChart::polar(1, profile.clone()).unwrap();
    let cart = MetricChart::cartesian(1, profile).unwrap();
    let s = normalize(
        &polar,
        &PhaseState::new(vec![1.5, 0.4, 0.0], vec![0.3, 0.2, 0.4]),
    )
    .unwrap();
    let pp = polar.to_cartesian(&s.position);
    let pv = fatflat::geometry::coords::polar_vector_to_cartesian(2, &s.position, &s.velocity);
    let a = integrate_geodesic(&polar, &s, 1.0, DEFAULT_STEP).unwrap();
    let b = integrate_geodesic(&cart, &PhaseState::new(pp, pv), 1.0, DEFAULT_STEP).unwrap();
    let end_a = polar.to_cartesian(&a.end().state.position);
    assert!(max_diff(&end_a, &b.end().state.position) < 1e-9);
}

#[test]
fn csv_has_header_and_one_row_per_sample() {
    let chart = MetricChart::cartesian(1, WarpingProfile::Flat).unwrap();
    let s = PhaseState::new(vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]);
    let csv = integrate_geodesic(&chart, &s, 0.01, DEFAULT_STEP)
        .unwrap()
        .to_csv()
        .unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x0,x1,x2,v0,v1,v2,energy");
    assert_eq!(lines.len(), 12);
    assert_eq!(
        lines[11],
        "1.0000000000000000e-2,1.0000000000000002e-2,0.0000000000000000e0,0.0000000000000000e0,\
         1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0"
    );
}

#[test]
fn transport_in_flat_space_is_trivial() {
    let chart = MetricChart::cartesian(1, WarpingProfile::Flat).unwrap();
    let s = PhaseState::new(vec![1.0, -2.0, 0.5], vec![0.6, 0.0, 0.8]);
    let path = integrate_geodesic(&chart, &s, 3.0, DEFAULT_STEP).unwrap();
    let frame = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    let out = parallel_transport(&path, &frame).unwrap();
    for (a, b) in out.frame.iter().zip(&frame) {
        assert!(max_diff(a, b) < 1e-15);
    }
    assert!(out.defect < 1e-15);
}

#[test]
fn transport_along_the_hyperbolic_axis_is_vertical_translation() {
    let chart = MetricChart::cartesian(1, WarpingProfile::Hyperbolic).unwrap();
    let s = PhaseState::new(vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic_switching(&chart, &s, 1.0, DEFAULT_STEP).unwrap();
    let frame = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
    let out = parallel_transport(&path, &frame).unwrap();
    for (a, b) in out.frame.iter().zip(&frame) {
        assert!(max_diff(a, b) < 1e-8);
    }
}

#[test]
fn transport_preserves_inner_products_on_random_orbits() {
    let chart = MetricChart::polar(1, interp()).unwrap();
    for i in 0..3 {
        let s = random_state(&chart, 300 + i);
        let path = integrate_geodesic_switching(&chart, &s, 20.0, DEFAULT_STEP).unwrap();
        let frame = vec![s.velocity.clone(), vec![1.0, 0.0, 0.0], vec![0.0, 0.3, 1.0]];
        let out = parallel_transport(&path, &frame).unwrap();
        assert!(out.defect <= 1e-8, "defect {:e}", out.defect);
        // the velocity is itself parallel
        let end = &path.end().state;
        assert_eq!(out.kind, path.end().kind);
        assert!(max_diff(&out.frame[0], &end.velocity) < 1e-9);
    }
}

#[test]
fn circle_holonomy_matches_gauss_bonnet() {
    // Around the circle r = r0 in a surface dr^2 + sigma^2 dtheta^2 a vector
    // turns by the enclosed total curvature 2 pi (1 - sigma'(r0)).
    let profile = interp();
    let chart = MetricChart::polar(1, profile.clone()).unwrap();
    for r0 in [2.0, 3.0, 5.0] {
        let jet = profile.sigma_tau(r0).unwrap();
        let curve = |t: f64| (vec![r0, t, 0.0], vec![0.0, 1.0, 0.0]);
        let out =
            parallel_transport_along(&chart, curve, TAU, DEFAULT_STEP, &[vec![1.0, 0.0, 0.0]])
                .unwrap();
        let w = &out.frame[0];
        let turned = (w[1] * jet.sigma).atan2(w[0]);
        let expected = TAU * (1.0 - jet.dsigma);
        let gap = (turned - expected).rem_euclid(TAU);
        assert!(gap.min(TAU - gap) < 1e-8, "r0 {r0}: {turned} vs {expected}");
        assert!(w[2].abs() < 1e-15);
    }
}

#[test]
fn riccati_in_the_flat_tube_decays_like_one_over_t() {
    let chart = MetricChart::cartesian(1, interp()).unwrap();
    let s = PhaseState::new(vec![0.01, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic(&chart, &s, 99.0, DEFAULT_STEP).unwrap();
    let out = riccati_expansion(&path, 1.0, 99.0).unwrap();
    let expected = nalgebra::DMatrix::identity(2, 2) / 100.0;
    assert!((out.u - expected).amax() < 1e-6);
    assert_eq!(out.trace.len(), 99_001);
}

#[test]
fn riccati_on_a_hyperbolic_orbit_sits_at_the_identity() {
    let chart = MetricChart::polar(1, WarpingProfile::Hyperbolic).unwrap();
    let tau = WarpingProfile::Hyperbolic.sigma_tau(1.0).unwrap().tau;
    let s = PhaseState::new(vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0 / tau]);
    let path = integrate_geodesic(&chart, &s, 20.0, DEFAULT_STEP).unwrap();
    let out = riccati_expansion(&path, 1.0, 20.0).unwrap();
    assert!((out.u - nalgebra::DMatrix::identity(2, 2)).amax() < 1e-6);
}

#[test]
fn riccati_blows_up_for_converging_fronts() {
    // U = -1 / (1 - t) in flat space
    let chart = MetricChart::cartesian(1, WarpingProfile::Flat).unwrap();
    let s = PhaseState::new(vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let path = integrate_geodesic(&chart, &s, 2.0, DEFAULT_STEP).unwrap();
    match riccati_expansion(&path, -1.0, 2.0) {
        Err(Error::RiccatiBlowUp { t, radius }) => {
            assert!(t > 0.99 && t <= 1.0 + 1e-9, "t {t} radius {radius}");
            assert!(radius > 1e3);
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
    assert!(riccati_expansion(&path, 1.0, 3.0).is_err());
}

#[test]
fn riccati_through_the_transition_region_converges() {
    let chart = MetricChart::polar(1, interp()).unwrap();
    let s = normalize(
        &chart,
        &PhaseState::new(vec![16.0, 0.0, 0.0], vec![1.0, 0.0, 0.2]),
    )
    .unwrap();
    let trace_at = |h: f64| {
        let path = integrate_geodesic(&chart, &s, 8.0, h).unwrap();
        riccati_expansion(&path, 1.0, 8.0).unwrap().u.trace()
    };
    let (coarse, fine) = (trace_at(1e-3), trace_at(5e-4));
    assert!((coarse - fine).abs() < 1e-9);
    assert!((coarse - 2.120_505_348_546_53).abs() < 1e-9, "{coarse:.16}");
}
