//! Integrates a geodesic through the flat core and transports a frame along it.

use fatflat::flow::{
    integrate_geodesic_switching, normalize, parallel_transport, riccati_expansion, PhaseState,
    DEFAULT_STEP,
};
use fatflat::geometry::MetricChart;
use fatflat::profiles::WarpingProfile;

fn main() -> fatflat::Result<()> {
    let chart = MetricChart::polar(1, WarpingProfile::interpolated(19.0)?)?;
    let start = normalize(
        &chart,
        &PhaseState::new(vec![0.8, 0.3, 0.0], vec![-0.9, 0.1, 0.5]),
    )?;
    let path = integrate_geodesic_switching(&chart, &start, 20.0, DEFAULT_STEP)?;
    let end = path.end_in_start_chart()?;
    println!(
        "end point {:?}, energy drift {:e}",
        end.position,
        path.energy_drift()?
    );

    let frame = chart.orthonormalize(
        &start.position,
        &[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ],
    )?;
    println!(
        "transported frame gram defect {:e}",
        parallel_transport(&path, &frame)?.defect
    );

    let riccati = riccati_expansion(&path, 1.0, 20.0)?;
    println!("Riccati solution at t = {}:\n{}", riccati.t, riccati.u);
    Ok(())
}
