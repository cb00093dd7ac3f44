//! Normalized correlations over computational-basis inputs and analyzers.

use multipath_correlation::config::{ExperimentConfig, Variant};
use multipath_correlation::experiment::run_cnot_table;

fn label(angle: f64) -> char {
    if angle == 0.0 {
        'H'
    } else {
        'V'
    }
}

fn main() -> multipath_correlation::Result<()> {
    let cfg = ExperimentConfig { variant: Variant::Cnot, ..ExperimentConfig::default() };
    for row in run_cnot_table(&cfg)?.rows {
        let p = row.polarization;
        println!(
            "in {}{}  out {}{}  {:.6}",
            label(p.phi_c),
            label(p.phi_t),
            label(p.theta_c),
            label(p.theta_t),
            row.analytic.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
