//! Samples sectional curvatures of the warped metric and of the hyperbolic model.

use fatflat::geometry::{
    curvature_components_closed_form, default_region, scan_nonpositive, sectional_curvature,
    MetricChart, TangentPlane,
};
use fatflat::profiles::WarpingProfile;

fn main() -> fatflat::Result<()> {
    let profile = WarpingProfile::interpolated(19.0)?;
    let chart = MetricChart::four_d(profile.clone());
    let scan = scan_nonpositive(&chart, 2000, 42, &default_region(&chart, 1e-3, 45.0))?;
    println!(
        "warped metric: K in [{:e}, {:e}], largest at {:?}",
        scan.min_k, scan.max_k, scan.argmax_point
    );

    let hyperbolic = MetricChart::polar(2, WarpingProfile::Hyperbolic)?;
    let scan = scan_nonpositive(
        &hyperbolic,
        500,
        7,
        &default_region(&hyperbolic, 1e-3, 10.0),
    )?;
    println!("hyperbolic model: K in [{}, {}]", scan.min_k, scan.max_k);

    let plane = TangentPlane {
        point: vec![19.0, 1.0, 1.0, 0.0],
        u: vec![1.0, 0.0, 0.0, 0.0],
        v: vec![0.0, 0.0, 0.0, 1.0],
    };
    println!(
        "K(dr, dz) at r = 19: {}",
        sectional_curvature(&chart, &plane)?
    );

    let c = curvature_components_closed_form(&profile, 19.5, 0.7)?;
    println!("closed-form components at r = 19.5: {:?}", c.as_array());
    Ok(())
}
