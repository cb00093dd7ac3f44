//! Spectral-integral oracle for the first-order correlation.
//!
//! `G1(t_a, t_b) = integral dnu n(nu) conj(m_a(w)) m_b(w) exp(i w (t_a - t_b))`
//! with `w = nu + omega0`, evaluated by the trapezoidal rule on a uniform
//! rotating-frame grid. The detector coefficients `m_d` come from the
//! transfer-matrix route of the network module, never from the path
//! expansion the closed forms use.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DetectionSettings, SpectralProfile};
use crate::network::NetworkSpec;

/// Rotating-frame integration grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureGrid {
    /// Half-width of the integration window in units of `delta_omega`.
    pub half_span: f64,
    /// Requested node spacing (absolute angular frequency). `None` picks the
    /// largest spacing the resolution rule allows.
    pub spacing: Option<f64>,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            half_span: 8.0,
            spacing: None,
        }
    }
}

impl QuadratureGrid {
    pub fn with_spacing(spacing: f64) -> Self {
        Self {
            spacing: Some(spacing),
            ..Self::default()
        }
    }

    /// Spacing bound `min(dw / 20, 2 pi / (20 tau_max))`.
    pub fn required_spacing(profile: &SpectralProfile, tau_max: f64) -> f64 {
        let envelope = profile.delta_omega / 20.0;
        if tau_max > 0.0 {
            envelope.min(2.0 * std::f64::consts::PI / (20.0 * tau_max))
        } else {
            envelope
        }
    }

    /// Node positions in the rotating frame, or a resolution error.
    pub fn nodes(&self, profile: &SpectralProfile, tau_max: f64) -> Result<Vec<f64>> {
        let required = Self::required_spacing(profile, tau_max);
        let spacing = match self.spacing {
            Some(h) if h > required || !(h > 0.0) => {
                return Err(Error::Resolution {
                    spacing: h,
                    required,
                })
            }
            Some(h) => h,
            None => required,
        };
        let half = self.half_span * profile.delta_omega;
        let intervals = ((2.0 * half) / spacing).ceil().max(1.0) as usize;
        let h = 2.0 * half / intervals as f64;
        Ok((0..=intervals).map(|k| -half + k as f64 * h).collect())
    }
}

/// Largest effective-time difference between any path of detector `a` and any of `b`.
fn tau_max(delays_a: &[f64], t_a: f64, delays_b: &[f64], t_b: f64) -> f64 {
    let mut tau: f64 = 0.0;
    for &da in delays_a {
        for &db in delays_b {
            tau = tau.max(((t_a - da) - (t_b - db)).abs());
        }
    }
    tau
}

/// Quadrature `G1(t_a, t_b)` between detectors `a` and `b` of any network.
pub fn g1_quadrature_pair(
    spec: &NetworkSpec,
    times: &[f64],
    a: usize,
    b: usize,
    profile: &SpectralProfile,
    analyzers: &[f64],
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    let n = spec.detector_count();
    if times.len() != n || a >= n || b >= n {
        return Err(Error::Configuration(format!(
            "detector pair ({a}, {b}) with {} times for {n} detectors",
            times.len()
        )));
    }
    // Path delays only fix the grid resolution; amplitudes are not used.
    let responses = spec.detector_responses(analyzers)?;
    let delays_a: Vec<f64> = responses[a].delays().collect();
    let delays_b: Vec<f64> = responses[b].delays().collect();
    let nodes = grid.nodes(profile, tau_max(&delays_a, times[a], &delays_b, times[b]))?;
    let h = nodes[1] - nodes[0];
    let last = nodes.len() - 1;
    let dt = times[a] - times[b];

    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &nu) in nodes.iter().enumerate() {
        let omega = nu + profile.omega0;
        let m = spec.field_coefficients(omega, analyzers)?;
        let weight = if k == 0 || k == last { 0.5 } else { 1.0 };
        let carrier = Complex64::from_polar(1.0, profile.omega0 * dt)
            * Complex64::from_polar(1.0, nu * dt);
        sum += m[a].conj() * m[b] * carrier * (weight * profile.density_rotating(nu));
    }
    Ok(sum * h)
}

/// Quadrature `G1(t_C, t_T)` of a two-detector network.
pub fn g1_quadrature(
    spec: &NetworkSpec,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    analyzers: &[f64],
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    g1_quadrature_pair(spec, &[detection.t_c, detection.t_t], 0, 1, profile, analyzers, grid)
}

/// Quadrature `G2` split into background and interference.
pub fn g2_quadrature(
    spec: &NetworkSpec,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    analyzers: &[f64],
    grid: &QuadratureGrid,
) -> Result<super::G2Parts> {
    let times = [detection.t_c, detection.t_t];
    let g = |a, b| g1_quadrature_pair(spec, &times, a, b, profile, analyzers, grid);
    Ok(super::G2Parts::from_g1(g(0, 0)?, g(1, 1)?, g(0, 1)?))
}
