//! Second- and N-order interference of multimode thermal light in
//! correlated-path interferometers.
//!
//! A thermal source feeds a beam splitter whose outputs pass through
//! unbalanced Mach-Zehnder stages. Even when every long/short arm imbalance
//! exceeds the coherence length, the correlation of photon-number
//! fluctuations at the two outputs shows a full-visibility fringe in the
//! relative phase of the `(L_C, L_T)` and `(S_C, S_T)` path pairs. Encoding
//! the paths in polarization reproduces the truth table of a CNOT gate and
//! Bell-type `cos^2` correlations without any entanglement.
//!
//! The crate evaluates these correlations three independent ways:
//!
//! * [`analytic`] closed forms built from the thermal Gaussian kernel,
//! * [`analytic::g1_quadrature`], a spectral integral over transfer matrices,
//! * [`montecarlo`], sampling classical Gaussian fields from the
//!   Glauber-Sudarshan distribution and correlating detected intensities.
//!
//! [`experiment`] ties them together into sweeps, CNOT tables, Bell curves,
//! N-order runs and a validation report, all written as CSV.

pub mod analytic;
pub mod config;
pub mod error;
pub mod experiment;
pub mod model;
pub mod montecarlo;
pub mod network;

pub use error::{Error, Result};
pub use model::{
    check_regime, effective_detection_time, mean_photon_number, relative_phase, DetectionSettings,
    PathGeometry, PolarizationSettings, RegimeReport, RegimeThresholds, SpectralProfile,
};
pub use network::NetworkSpec;
