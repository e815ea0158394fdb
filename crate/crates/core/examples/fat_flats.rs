//! Hausdorff distances, union volumes under isometries and thickened strips.

use std::f64::consts::FRAC_PI_2;

use fatflat::flats::{
    box_coverage, hausdorff_distance, thicken_strips, union_volume, ConvexBody, FramedStrip2D,
    Isometry, PointCloud, DEFAULT_MC_SAMPLES,
};

fn main() -> fatflat::Result<()> {
    let inner = PointCloud::circle([0.0, 0.0], 1.0, 360)?;
    let outer = PointCloud::circle([0.0, 0.0], 2.0, 360)?;
    println!(
        "circles of radius 1 and 2: {}",
        hausdorff_distance(&inner, &outer)?
    );

    let square = ConvexBody::square(1.0)?;
    for (label, map) in [
        ("shift by 0.5", Isometry::translation(&[0.5, 0.0])),
        (
            "quarter turn",
            Isometry::rotation_about(FRAC_PI_2, [0.5, 0.5]),
        ),
    ] {
        let r = union_volume(&square, &map, DEFAULT_MC_SAMPLES, 1)?;
        println!(
            "square, {label}: union {:.4} +- {:.1e}, translational part {:?}",
            r.union_volume.value, r.union_volume.std_error, r.translational_part
        );
    }

    for theta in [0.1, 0.01, 0.001] {
        let f1 = FramedStrip2D::new(0.0, 1.0, [0.0, 0.0])?;
        let f2 = FramedStrip2D::new(theta, 1.0, [0.0, 0.0])?;
        let b = thicken_strips(&f1, &f2)?;
        println!(
            "angle {theta}: box length {:.3}, cross-section {}, coverage {}",
            b.length,
            b.cross_section(),
            box_coverage(&b, &f1, &f2, 50)
        );
    }
    Ok(())
}
