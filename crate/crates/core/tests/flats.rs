use std::f64::consts::{FRAC_PI_2, PI};

use fatflat::flats::*;
use fatflat::geometry::sample_rng;
use fatflat::Error;
use proptest::prelude::*;
use rand::Rng;

fn random_cloud(seed: u64, index: u64, n: usize) -> PointCloud {
    let mut rng = sample_rng(seed, index);
    PointCloud::new(
        (0..n)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect(),
    )
    .unwrap()
}

fn brute_hausdorff(x: &PointCloud, y: &PointCloud) -> f64 {
    let directed = |a: &PointCloud, b: &PointCloud| {
        let mut worst = 0.0f64;
        for p in &a.points {
            let mut best = f64::INFINITY;
            for q in &b.points {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                best = best.min(d);
            }
            worst = worst.max(best);
        }
        worst
    };
    directed(x, y).max(directed(y, x))
}

#[test]
fn hausdorff_examples() {
    let origin = PointCloud::new(vec![vec![0.0, 0.0]]).unwrap();
    let far = PointCloud::new(vec![vec![3.0, 4.0]]).unwrap();
    assert_eq!(hausdorff_distance(&origin, &far).unwrap(), 5.0);

    let inner = PointCloud::circle([0.0, 0.0], 1.0, 360).unwrap();
    let outer = PointCloud::circle([0.0, 0.0], 2.0, 360).unwrap();
    assert!((hausdorff_distance(&inner, &outer).unwrap() - 1.0).abs() <= 2.0 * PI / 360.0);

    let a = random_cloud(9, 0, 50);
    let b = random_cloud(9, 1, 50);
    let fast = hausdorff_distance(&a, &b).unwrap();
    assert!((fast - brute_hausdorff(&a, &b)).abs() < 1e-15);

    let three = PointCloud::new(vec![vec![0.0, 0.0, 0.0]]).unwrap();
    assert_eq!(
        hausdorff_distance(&origin, &three),
        Err(Error::DimensionMismatch(2, 3))
    );
    assert!(PointCloud::new(vec![]).is_err());
}

#[test]
fn hausdorff_is_a_metric_on_random_triples() {
    for i in 0..1000u64 {
        let x = random_cloud(21, 3 * i, 12);
        let y = random_cloud(21, 3 * i + 1, 12);
        let z = random_cloud(21, 3 * i + 2, 12);
        let xy = hausdorff_distance(&x, &y).unwrap();
        assert_eq!(xy, hausdorff_distance(&y, &x).unwrap());
        assert_eq!(hausdorff_distance(&x, &x).unwrap(), 0.0);
        let xz = hausdorff_distance(&x, &z).unwrap();
        let yz = hausdorff_distance(&y, &z).unwrap();
        assert!(xz <= xy + yz + 1e-12);
    }
}

proptest! {
    #[test]
    fn hausdorff_ignores_order_and_repeats(seed in 0u64..1000, n in 1usize..20) {
        let x = random_cloud(seed, 0, n);
        let mut shuffled = x.points.clone();
        shuffled.reverse();
        shuffled.push(x.points[0].clone());
        let y = PointCloud::new(shuffled).unwrap();
        prop_assert_eq!(hausdorff_distance(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn translating_a_cloud_moves_it_by_the_offset(seed in 0u64..1000, dx in -2.0f64..2.0, dy in -2.0f64..2.0) {
        let x = random_cloud(seed, 0, 15);
        let y = PointCloud::new(x.points.iter().map(|p| vec![p[0] + dx, p[1] + dy]).collect()).unwrap();
        // distance is at most the shift and at least the shift minus the diameter
        let d = hausdorff_distance(&x, &y).unwrap();
        let shift = dx.hypot(dy);
        prop_assert!(d <= shift + 1e-12);
        prop_assert!(d >= shift - 2f64.sqrt() - 1e-12);
    }
}

#[test]
fn convex_body_validation_and_csv() {
    let tri = ConvexBody::from_csv("# triangle\n0,0\n1, 0\n\n0,1\n").unwrap();
    assert_eq!(tri.dim, 2);
    assert_eq!(tri.exact_volume(), Some(0.5));
    assert!(tri.contains(&[0.2, 0.2]));
    assert!(!tri.contains(&[0.6, 0.6]));
    assert!(matches!(
        ConvexBody::from_csv("0,0\n1,x\n"),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        ConvexBody::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]),
        Err(Error::DegenerateBody(_))
    ));
    assert!(matches!(
        ConvexBody::new(vec![vec![0.0, 0.0], vec![1.0]]),
        Err(Error::DimensionMismatch(1, 2))
    ));
    assert!(ConvexBody::new(vec![vec![0.0; 4], vec![1.0; 4]]).is_err());
    let interval = ConvexBody::new(vec![vec![-1.0], vec![2.0], vec![0.5]]).unwrap();
    assert_eq!(interval.exact_volume(), Some(3.0));
    let disk = ConvexBody::polygonized_disk(1.0, 256).unwrap();
    let polygon_area = 0.5 * 256.0 * (2.0 * PI / 256.0).sin();
    assert!((disk.exact_volume().unwrap() - polygon_area).abs() < 1e-12);
}

fn within(estimate: &VolumeEstimate, exact: f64) -> bool {
    (estimate.value - exact).abs() <= 3.0 * estimate.std_error.max(1e-12)
}

#[test]
fn translated_square_grows_by_half() {
    let square = ConvexBody::square(1.0).unwrap();
    let shift = Isometry::translation(&[0.5, 0.0]);
    let report = union_volume(&square, &shift, DEFAULT_MC_SAMPLES, 1).unwrap();
    assert!(within(&report.volume, 1.0), "{:?}", report.volume);
    assert!(
        within(&report.union_volume, 1.5),
        "{:?}",
        report.union_volume
    );
    assert!(within(&report.increase, 0.5));
    assert_eq!(report.translational_part, vec![0.5, 0.0]);
}

#[test]
fn rotated_square_gains_nothing() {
    let square = ConvexBody::square(1.0).unwrap();
    let turn = Isometry::rotation_about(FRAC_PI_2, [0.5, 0.5]);
    let report = union_volume(&square, &turn, DEFAULT_MC_SAMPLES, 2).unwrap();
    assert!(within(&report.volume, 1.0));
    assert!(within(&report.union_volume, 1.0));
    assert!(report.translational_part.iter().all(|c| c.abs() < 1e-15));
}

/// Area of the union of two unit-radius disks at distance `d`.
fn disk_union_area(r: f64, d: f64) -> f64 {
    let lens = 2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt();
    2.0 * PI * r * r - lens
}

#[test]
fn shifted_disk_increase_matches_lens_formula() {
    let disk = ConvexBody::polygonized_disk(1.0, 256).unwrap();
    let shift = Isometry::translation(&[0.0, 1e-2]);
    let report = union_volume(&disk, &shift, DEFAULT_MC_SAMPLES, 3).unwrap();
    let expected = disk_union_area(1.0, 1e-2) - PI;
    assert!((expected - 0.02).abs() < 1e-6);
    assert!(report.increase.value > 3.0 * report.increase.std_error);
    assert!(
        within(&report.increase, expected),
        "{:?} vs {expected}",
        report.increase
    );
    assert!(report.union_volume.value > report.volume.value);
}

#[test]
fn union_volume_is_reproducible_and_validated() {
    let square = ConvexBody::square(1.0).unwrap();
    let shift = Isometry::translation(&[0.3, 0.1]);
    let a = union_volume(&square, &shift, 10_000, 7).unwrap();
    let b = union_volume(&square, &shift, 10_000, 7).unwrap();
    assert_eq!(a, b);
    assert!(union_volume(&square, &Isometry::translation(&[1.0]), 10, 0).is_err());
    assert!(union_volume(&square, &shift, 0, 0).is_err());
}

#[test]
fn cube_translation_in_three_dimensions() {
    let mut v = vec![];
    for i in 0..8 {
        v.push(vec![
            (i & 1) as f64,
            ((i >> 1) & 1) as f64,
            ((i >> 2) & 1) as f64,
        ]);
    }
    let cube = ConvexBody::new(v).unwrap();
    let shift = Isometry::translation(&[0.0, 0.0, 0.25]);
    let report = union_volume(&cube, &shift, 200_000, 4).unwrap();
    assert!(within(&report.volume, 1.0));
    assert!(within(&report.union_volume, 1.25));
}

fn crossing(delta: f64, theta: f64) -> (FramedStrip2D, FramedStrip2D) {
    (
        FramedStrip2D::new(0.0, delta, [0.0, 0.0]).unwrap(),
        FramedStrip2D::new(theta, delta, [0.0, 0.0]).unwrap(),
    )
}

/// Longest `t`-window with the band `s` in `[delta, delta + c]` inside the
/// tilted strip, for strips through a common point.
fn exact_length(delta: f64, theta: f64) -> f64 {
    let c = delta / 4.0;
    (2.0 * delta - c * theta.cos()) / theta.sin()
}

#[test]
fn thickened_box_examples() {
    let (f1, f2) = crossing(1.0, 0.01);
    let b = thicken_strips(&f1, &f2).unwrap();
    assert!(b.cross_section() >= 2.25);
    assert!((b.length - exact_length(1.0, 0.01)).abs() < 1e-9 * b.length);
    assert_eq!(box_coverage(&b, &f1, &f2, 100), 1.0);

    let (g1, g2) = crossing(1.0, 0.001);
    let narrow = thicken_strips(&g1, &g2).unwrap();
    let ratio = narrow.length / b.length;
    let exact = exact_length(1.0, 0.001) / exact_length(1.0, 0.01);
    assert!((ratio - exact).abs() < 1e-9);
    assert!(ratio > 9.99);

    let (p1, p2) = crossing(1.0, 0.0);
    assert_eq!(thicken_strips(&p1, &p2), Err(Error::ParallelStrips));
    let (w1, w2) = crossing(0.1, 0.2);
    assert!(matches!(
        thicken_strips(&w1, &w2),
        Err(Error::InvalidParameter(_))
    ));
    assert!(FramedStrip2D::new(0.0, 0.0, [0.0, 0.0]).is_err());
}

#[test]
fn box_length_grows_as_the_angle_closes() {
    let mut previous = 0.0;
    for theta in [0.1, 0.05, 0.02, 0.01, 0.005] {
        let (f1, f2) = crossing(1.0, theta);
        let b = thicken_strips(&f1, &f2).unwrap();
        assert!(b.length > previous);
        assert!(b.cross_section() >= 2.25 - 1e-15);
        assert_eq!(box_coverage(&b, &f1, &f2, 100), 1.0);
        previous = b.length;
    }
}

#[test]
fn general_position_strips_are_covered() {
    for i in 0..50u64 {
        let mut rng = sample_rng(11, i);
        let phi = rng.gen_range(0.0..PI);
        let d1 = rng.gen_range(0.5..2.0);
        let d2 = rng.gen_range(0.5..2.0);
        let theta = rng.gen_range(0.01..0.4) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let base = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let f1 = FramedStrip2D::new(phi, d1, base).unwrap();
        let shift = rng.gen_range(-0.3..0.3);
        let f2 = FramedStrip2D::new(phi + theta, d2, [base[0] + shift, base[1] - shift]).unwrap();
        let b = thicken_strips(&f1, &f2).unwrap();
        assert!(b.cross_section() >= 2.0 * d1 + d1.min(d2) / 4.0 - 1e-12);
        assert!(b.length > 0.0);
        assert_eq!(box_coverage(&b, &f1, &f2, 100), 1.0, "case {i}");
    }
}
