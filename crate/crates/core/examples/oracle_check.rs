//! Closed-form path expansion against direct frequency quadrature.

use multipath_correlation::analytic::{g1_matrix, g1_quadrature, QuadratureGrid};
use multipath_correlation::{DetectionSettings, NetworkSpec, PathGeometry, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(250.0, 1.5, 3.0)?;
    let geometry = PathGeometry::new(12.0, 3.5, 11.2, 2.0, 1.0)?;
    let det = DetectionSettings::new(0.4, -0.3);

    for (name, spec, analyzers) in [
        ("scalar", NetworkSpec::two_path_scalar(geometry), vec![]),
        ("cnot", NetworkSpec::cnot(geometry, 0.6, -0.2), vec![1.1, 0.3]),
    ] {
        let closed = g1_matrix(&spec, &[det.t_c, det.t_t], &profile, &analyzers)?[0][1];
        let quad = g1_quadrature(&spec, &det, &profile, &analyzers, &QuadratureGrid::default())?;
        println!("{name:6} closed {closed:.9}  quadrature {quad:.9}  |diff|/r {:.1e}", (closed - quad).norm() / profile.mean_rate);
    }

    let coarse = g1_quadrature(
        &NetworkSpec::two_path_scalar(geometry),
        &det,
        &profile,
        &[],
        &QuadratureGrid::with_spacing(0.5),
    );
    println!("coarse grid: {}", coarse.unwrap_err());
    Ok(())
}
