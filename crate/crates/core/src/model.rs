//! Domain types shared by every engine: the thermal spectrum, path geometry,
//! detection and polarization settings, and the regime check that decides
//! whether only the correlated path pairs interfere.
//!
//! All formulas are written in terms of the dimensionless products
//! `delay * delta_omega` and `omega * length / c`, so any consistent unit
//! system works. The natural choice is `delta_omega = 1`, `c = 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gaussian thermal spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralProfile {
    /// Carrier angular frequency.
    pub omega0: f64,
    /// Spectral width; `1 / delta_omega` is the coherence time.
    pub delta_omega: f64,
    /// Mean photon rate.
    pub mean_rate: f64,
}

impl SpectralProfile {
    pub fn new(omega0: f64, delta_omega: f64, mean_rate: f64) -> Result<Self> {
        let profile = Self {
            omega0,
            delta_omega,
            mean_rate,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_omega.is_finite() && self.delta_omega > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "delta_omega must be positive, got {}",
                self.delta_omega
            )));
        }
        if !(self.mean_rate.is_finite() && self.mean_rate > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "mean_rate must be positive, got {}",
                self.mean_rate
            )));
        }
        if !(self.omega0.is_finite() && self.omega0 >= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "omega0 must be non-negative, got {}",
                self.omega0
            )));
        }
        Ok(())
    }

    pub fn coherence_time(&self) -> f64 {
        1.0 / self.delta_omega
    }

    /// Mean photon number density at angular frequency `omega`.
    pub fn mean_photon_number(&self, omega: f64) -> f64 {
        mean_photon_number(self, omega)
    }

    /// Same density in the rotating frame `nu = omega - omega0`.
    pub fn density_rotating(&self, nu: f64) -> f64 {
        let x = nu / self.delta_omega;
        self.mean_rate / ((2.0 * PI).sqrt() * self.delta_omega) * (-0.5 * x * x).exp()
    }
}

/// `r * exp(-(omega - omega0)^2 / (2 dw^2)) / (sqrt(2 pi) dw)`
pub fn mean_photon_number(profile: &SpectralProfile, omega: f64) -> f64 {
    profile.density_rotating(omega - profile.omega0)
}

/// Arm lengths of the control (`c`) and target (`t`) Mach-Zehnder stages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathGeometry {
    pub l_c: f64,
    pub s_c: f64,
    pub l_t: f64,
    pub s_t: f64,
    /// Propagation speed.
    pub c: f64,
}

impl PathGeometry {
    pub fn new(l_c: f64, s_c: f64, l_t: f64, s_t: f64, c: f64) -> Result<Self> {
        let geometry = Self {
            l_c,
            s_c,
            l_t,
            s_t,
            c,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    /// Both stages with long arm `long` and short arm `short`, unit speed.
    pub fn balanced(long: f64, short: f64) -> Self {
        Self {
            l_c: long,
            s_c: short,
            l_t: long,
            s_t: short,
            c: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "propagation speed must be positive, got {}",
                self.c
            )));
        }
        for (name, len) in [
            ("l_c", self.l_c),
            ("s_c", self.s_c),
            ("l_t", self.l_t),
            ("s_t", self.s_t),
        ] {
            if !(len.is_finite() && len >= 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be a non-negative length, got {len}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DetectionSettings {
    pub t_c: f64,
    pub t_t: f64,
}

impl DetectionSettings {
    pub fn new(t_c: f64, t_t: f64) -> Self {
        Self { t_c, t_t }
    }

    pub fn equal_times(t: f64) -> Self {
        Self { t_c: t, t_t: t }
    }
}

/// Preparation (`phi_*`) and analyzer (`theta_*`) angles in radians.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolarizationSettings {
    pub phi_c: f64,
    pub phi_t: f64,
    pub theta_c: f64,
    pub theta_t: f64,
}

impl PolarizationSettings {
    pub fn new(phi_c: f64, phi_t: f64, theta_c: f64, theta_t: f64) -> Self {
        Self {
            phi_c,
            phi_t,
            theta_c,
            theta_t,
        }
    }

    pub fn with_analyzers(self, theta_c: f64, theta_t: f64) -> Self {
        Self {
            theta_c,
            theta_t,
            ..self
        }
    }
}

/// Detection time with the propagation delay of a path of length `length` removed.
pub fn effective_detection_time(t: f64, length: f64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "propagation speed must be positive, got {c}"
        )));
    }
    Ok(t - length / c)
}

/// The four effective detection times `(t_c^L, t_c^S, t_t^L, t_t^S)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveTimes {
    pub control_long: f64,
    pub control_short: f64,
    pub target_long: f64,
    pub target_short: f64,
}

impl EffectiveTimes {
    pub fn new(geometry: &PathGeometry, detection: &DetectionSettings) -> Self {
        let c = geometry.c;
        Self {
            control_long: detection.t_c - geometry.l_c / c,
            control_short: detection.t_c - geometry.s_c / c,
            target_long: detection.t_t - geometry.l_t / c,
            target_short: detection.t_t - geometry.s_t / c,
        }
    }
}

/// Phase of the `(L_C, L_T)` pair relative to the `(S_C, S_T)` pair.
pub fn relative_phase(geometry: &PathGeometry, profile: &SpectralProfile) -> f64 {
    profile.omega0 / geometry.c * ((geometry.l_c - geometry.l_t) - (geometry.s_c - geometry.s_t))
}

/// Limits used to turn the "much smaller" / "much larger" conditions into numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeThresholds {
    /// Largest allowed same-pair delay, in units of the coherence time.
    pub small: f64,
    /// Smallest allowed cross-pair delay, in units of the coherence time.
    pub large: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        // exp(-x^2/2) is >= 0.9998 at 0.02 and far below f64 range at 50.
        Self {
            small: 0.02,
            large: 50.0,
        }
    }
}

impl RegimeThresholds {
    pub fn new(small: f64, large: f64) -> Result<Self> {
        if !(small > 0.0 && small < 1.0 && large > 1.0 && large.is_finite()) {
            return Err(Error::Configuration(format!(
                "regime thresholds must satisfy 0 < small < 1 < large, got small={small} large={large}"
            )));
        }
        Ok(Self { small, large })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport {
    /// `|t_c^L - t_t^L| dw` and `|t_c^S - t_t^S| dw`.
    pub same_pair_ratios: [f64; 2],
    /// `|t_c^L - t_t^S| dw` and `|t_t^L - t_c^S| dw`.
    pub cross_pair_ratios: [f64; 2],
    /// Smaller of the two arm imbalances `|L_d - S_d| dw / c`.
    pub imbalance_ratio: f64,
    pub imbalance_ok: bool,
    pub in_regime: bool,
    pub thresholds: RegimeThresholds,
}

pub fn check_regime(
    geometry: &PathGeometry,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    thresholds: &RegimeThresholds,
) -> RegimeReport {
    let eff = EffectiveTimes::new(geometry, detection);
    let dw = profile.delta_omega;
    let same_pair_ratios = [
        (eff.control_long - eff.target_long).abs() * dw,
        (eff.control_short - eff.target_short).abs() * dw,
    ];
    let cross_pair_ratios = [
        (eff.control_long - eff.target_short).abs() * dw,
        (eff.target_long - eff.control_short).abs() * dw,
    ];
    let imbalance_ratio = ((geometry.l_c - geometry.s_c).abs())
        .min((geometry.l_t - geometry.s_t).abs())
        * dw
        / geometry.c;
    let in_regime = same_pair_ratios.iter().all(|&r| r <= thresholds.small)
        && cross_pair_ratios.iter().all(|&r| r >= thresholds.large);
    RegimeReport {
        same_pair_ratios,
        cross_pair_ratios,
        imbalance_ratio,
        imbalance_ok: imbalance_ratio >= thresholds.large,
        in_regime,
        thresholds: *thresholds,
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}
