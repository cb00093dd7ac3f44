//! Three-detector fluctuation product of an N-channel network.

use multipath_correlation::analytic::n_order_fluctuation_correlator;
use multipath_correlation::montecarlo::{estimate_correlator, EstimatorOptions};
use multipath_correlation::network::PTypeStage;
use multipath_correlation::{NetworkSpec, SpectralProfile};

fn main() -> multipath_correlation::Result<()> {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0)?;
    let spec = NetworkSpec::n_order(
        &[0.3, 0.9, -0.4],
        &[PTypeStage::control(80.0, 0.0), PTypeStage::target(80.0, 0.0), PTypeStage::control(80.0, 0.0)],
        1.0,
    )?;
    let times = [0.0; 3];
    let analyzers = [0.2, 0.5, 1.0];

    let analytic = n_order_fluctuation_correlator(&spec, &times, &profile, &analyzers)?;
    let mc = estimate_correlator(&spec, &times, &profile, &analyzers, &EstimatorOptions::new(40_000, 20, 3))?;
    println!("product moment {:.6e}", analytic.product_moment);
    println!("cycle sum      {:.6e}", analytic.cycle_sum);
    println!("monte carlo    {:.6e} +- {:.1e}", mc.estimate, mc.std_error);
    println!("({})", analytic.note);
    Ok(())
}
