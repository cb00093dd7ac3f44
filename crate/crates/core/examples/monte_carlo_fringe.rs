//! Stochastic-field estimate of the fringe next to the closed form.
//!
//! All phase points share one stream of field samples.

use std::f64::consts::PI;

use multipath_correlation::analytic::g2;
use multipath_correlation::montecarlo::{estimate_family, EstimatorOptions, McSetup};
use multipath_correlation::{DetectionSettings, NetworkSpec, PathGeometry, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0)?;
    let base = PathGeometry::balanced(100.0, 0.0);
    let det = DetectionSettings::default();
    let phases: Vec<f64> = (0..8).map(|k| 2.0 * PI * k as f64 / 8.0).collect();

    let specs: Vec<NetworkSpec> = phases
        .iter()
        .map(|p| NetworkSpec::two_path_scalar(PathGeometry { l_c: base.l_c + p / profile.omega0, ..base }))
        .collect();
    let setups: Vec<McSetup> = specs.iter().map(|s| McSetup::new(s.clone(), vec![0.0, 0.0], vec![vec![]])).collect();
    let estimates = estimate_family(&setups, &profile, &EstimatorOptions::new(20_000, 20, 7))?;

    println!("phase,exact,mc,stderr,z");
    for ((p, spec), est) in phases.iter().zip(&specs).zip(&estimates) {
        let exact = g2(spec, &det, &profile, &[])?.interference;
        let e = &est[0];
        println!("{p:.4},{exact:.5},{:.5},{:.5},{:.2}", e.estimate, e.std_error, e.z_score(exact));
    }
    Ok(())
}
