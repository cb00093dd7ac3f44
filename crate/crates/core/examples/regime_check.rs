//! When do only the correlated path pairs interfere?

use multipath_correlation::analytic::regime_fringe;
use multipath_correlation::{check_regime, DetectionSettings, Error, PathGeometry, RegimeThresholds, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0)?;
    let th = RegimeThresholds::default();
    let cases = [
        ("balanced, long delay", PathGeometry::balanced(100.0, 0.0), DetectionSettings::default()),
        ("short delay", PathGeometry::balanced(10.0, 0.0), DetectionSettings::default()),
        ("detection mismatch", PathGeometry::balanced(100.0, 0.0), DetectionSettings::new(10.0, 0.0)),
    ];
    for (name, geometry, det) in cases {
        let report = check_regime(&geometry, &det, &profile, &th);
        println!(
            "{name}: same {:?} cross {:?} in regime {}",
            report.same_pair_ratios, report.cross_pair_ratios, report.in_regime
        );
        match regime_fringe(&geometry, &det, &profile, None, &th) {
            Ok(r) => println!("  fringe {:.6}", r.value),
            Err(Error::RegimeViolation(_)) => println!("  regime formula refused"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
