//! Fluctuation-correlation fringe of the scalar network versus the relative phase.

use std::f64::consts::PI;

use multipath_correlation::analytic::{g2, regime_fringe};
use multipath_correlation::{DetectionSettings, NetworkSpec, PathGeometry, RegimeThresholds, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0)?;
    let det = DetectionSettings::equal_times(0.0);
    let base = PathGeometry::balanced(100.0, 0.0);

    println!("phase,exact,regime");
    for k in 0..12 {
        let phase = 2.0 * PI * k as f64 / 12.0;
        let geometry = PathGeometry { l_c: base.l_c + phase / profile.omega0, ..base };
        let exact = g2(&NetworkSpec::two_path_scalar(geometry), &det, &profile, &[])?.interference;
        let approx = regime_fringe(&geometry, &det, &profile, None, &RegimeThresholds::default())?;
        println!("{phase:.4},{exact:.9},{:.9}", approx.value);
    }
    Ok(())
}
