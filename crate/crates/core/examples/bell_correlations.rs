//! Analyzer dependence of the pi/4 control preparation: a cos^2 law in the angle difference.

use std::f64::consts::{FRAC_PI_4, PI};

use multipath_correlation::analytic::{g1_polarized, POLARIZED_NORM};
use multipath_correlation::{DetectionSettings, PathGeometry, PolarizationSettings, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(1000.0, 1.0, 2.0)?;
    let geometry = PathGeometry::balanced(100.0, 0.0);
    let det = DetectionSettings::default();
    let norm = profile.mean_rate.powi(2) * POLARIZED_NORM / 2.0;

    println!("theta_c,theta_t,normalized,cos2");
    for (tc, tt) in [(0.0, 0.0), (0.4, 0.1), (PI / 3.0, 0.0), (1.0, -0.5), (PI / 2.0, 0.0), (2.0, 1.2)] {
        let pol = PolarizationSettings::new(FRAC_PI_4, 0.0, tc, tt);
        let value = g1_polarized(&geometry, &det, &profile, &pol).norm_sqr() / norm;
        println!("{tc:.3},{tt:.3},{value:.9},{:.9}", (tc - tt).cos().powi(2));
    }
    Ok(())
}
