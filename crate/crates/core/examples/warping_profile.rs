//! Evaluates the interpolating profile and runs its property checks.

use fatflat::profiles::{boundary_match, verify_profile, WarpingProfile};

fn main() -> fatflat::Result<()> {
    let profile = WarpingProfile::interpolated(19.0)?;
    println!(
        "{} flat below r = {:.4}, hyperbolic above r = {}",
        profile.name(),
        profile.flat_radius(),
        profile.matching_radius()
    );

    for r in [0.01, 1.0, 10.0, 19.0, 30.0] {
        let jet = profile.sigma_tau(r)?;
        println!(
            "r = {r:>5}: rho = {:.6e}  sigma = {:.6e}  tau = {:.6e}",
            profile.rho(r).0,
            jet.sigma,
            jet.tau
        );
    }

    let report = verify_profile(&profile, 60.0, 1e-3)?;
    for check in &report.checks {
        println!(
            "{:<40} {} (worst {:e} at r = {})",
            check.name, check.passed, check.worst_value, check.worst_location
        );
    }
    println!(
        "boundary mismatch {:e}",
        boundary_match(&profile, 60.0, 1e-3).max()
    );
    Ok(())
}
