//! Visibility of the fluctuation correlator and of the full second-order correlation.

use std::f64::consts::PI;

use multipath_correlation::analytic::{g2, visibility_of_values};
use multipath_correlation::{DetectionSettings, NetworkSpec, PathGeometry, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0)?;
    let base = PathGeometry::balanced(100.0, 0.0);
    let det = DetectionSettings::equal_times(0.0);

    let (mut fluct, mut total) = (Vec::new(), Vec::new());
    for k in 0..36 {
        let phase = 2.0 * PI * k as f64 / 36.0;
        let geometry = PathGeometry { l_c: base.l_c + phase / profile.omega0, ..base };
        let parts = g2(&NetworkSpec::two_path_scalar(geometry), &det, &profile, &[])?;
        fluct.push(parts.interference);
        total.push(parts.total());
    }
    println!("fluctuation correlator visibility: {:.6}", visibility_of_values(&fluct)?);
    println!("G2 visibility:                     {:.6}", visibility_of_values(&total)?);
    Ok(())
}
