use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::SpectralProfile;

pub const MIN_MODES: usize = 64;
pub const DEFAULT_MODES: usize = 1024;
pub const DEFAULT_HALF_SPAN: f64 = 8.0;

/// Delay margin, in coherence times, kept between the largest physical
/// delay and the first revival of the discrete mode comb.
pub const REVIVAL_MARGIN: f64 = 12.0;

/// Uniform comb of rotating-frame mode frequencies `nu_k = omega_k - omega0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeGrid {
    pub nu: Vec<f64>,
    pub spacing: f64,
}

impl ModeGrid {
    /// `modes` frequencies centred on the carrier, spanning `+-half_span` widths.
    pub fn new(profile: &SpectralProfile, modes: usize, half_span: f64) -> Result<Self> {
        if modes < MIN_MODES {
            return Err(Error::Configuration(format!(
                "mode grid needs at least {MIN_MODES} modes, got {modes}"
            )));
        }
        let half = half_span * profile.delta_omega;
        let spacing = 2.0 * half / (modes - 1) as f64;
        let nu = (0..modes).map(|k| -half + k as f64 * spacing).collect();
        Ok(Self { nu, spacing })
    }

    /// Default grid, refined until it resolves delays up to `tau_max`.
    pub fn for_delays(profile: &SpectralProfile, tau_max: f64) -> Self {
        let mut modes = DEFAULT_MODES;
        loop {
            let grid = Self::new(profile, modes, DEFAULT_HALF_SPAN).expect("modes above minimum");
            if grid.check_resolution(profile, tau_max).is_ok() {
                return grid;
            }
            modes *= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }

    /// The comb's correlation function repeats with period `2 pi / spacing`;
    /// the spacing must resolve the spectral envelope and push that revival
    /// beyond every delay in use.
    pub fn check_resolution(&self, profile: &SpectralProfile, tau_max: f64) -> Result<()> {
        let envelope = profile.delta_omega / 20.0;
        let revival = 2.0 * PI / (tau_max + REVIVAL_MARGIN / profile.delta_omega);
        let required = envelope.min(revival);
        if self.spacing > required {
            return Err(Error::Resolution {
                spacing: self.spacing,
                required,
            });
        }
        Ok(())
    }
}
