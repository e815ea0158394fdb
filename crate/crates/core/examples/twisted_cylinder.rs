//! Core holonomy, closing scans and the singular flat tube of a twisted cylinder.

use std::f64::consts::FRAC_PI_2;

use fatflat::cylinder::{
    closing_scan, core_holonomy, eigen_obstruction, singular_membership, RotationBlock,
    TwistedCylinder,
};
use fatflat::flow::{PhaseState, DEFAULT_STEP};
use fatflat::profiles::WarpingProfile;

fn main() -> fatflat::Result<()> {
    let profile = WarpingProfile::interpolated(19.0)?;
    let cyl = TwistedCylinder::new(1.0, RotationBlock::new(vec![1.0])?, profile.clone())?;
    println!("core holonomy:\n{}", core_holonomy(&cyl)?);

    let quarter = TwistedCylinder::new(1.0, RotationBlock::new(vec![FRAC_PI_2])?, profile)?;
    let scan = closing_scan(&quarter, 0.01, 12, 1e-10)?;
    println!("quarter turn closes at s = {:?}", scan.closed);
    println!(
        "eigenvalue one at s = {:?}",
        eigen_obstruction(&quarter.rho, 12, 1e-9)?.flagged
    );

    let irrational = closing_scan(&cyl, 0.01, 10_000, 1e-9)?;
    println!(
        "one radian: closest return {:e} at s = {}",
        irrational.min_distance, irrational.argmin
    );

    let orbit = PhaseState::new(vec![0.02, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let m = singular_membership(&cyl, &orbit, 100.0, DEFAULT_STEP)?;
    println!(
        "axis-parallel orbit stays in the flat tube: {} (max curvature {:e})",
        m.inside, m.max_curvature
    );
    Ok(())
}
