use num_complex::Complex64;

use super::{CorrelationResult, Method};
use crate::error::{Error, Result};
use crate::model::{
    check_regime, relative_phase, DetectionSettings, EffectiveTimes, PathGeometry,
    PolarizationSettings, RegimeThresholds, SpectralProfile,
};
use crate::network::{DetectorResponse, NetworkSpec};

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Thermal first-order kernel `r exp(i w0 (t1 - t2)) exp(-(t1 - t2)^2 dw^2 / 2)`.
pub fn gaussian_kernel(profile: &SpectralProfile, t1: f64, t2: f64) -> Complex64 {
    let tau = t1 - t2;
    let x = tau * profile.delta_omega;
    Complex64::from_polar(profile.mean_rate * (-0.5 * x * x).exp(), profile.omega0 * tau)
}

/// Four-term first-order correlation of the scalar network (`K = 1`).
pub fn g1_two_path(
    geometry: &PathGeometry,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
) -> Complex64 {
    let eff = EffectiveTimes::new(geometry, detection);
    let control = [eff.control_long, eff.control_short];
    let target = [eff.target_long, eff.target_short];
    let mut sum = Complex64::new(0.0, 0.0);
    for &tc in &control {
        for &tt in &target {
            sum += gaussian_kernel(profile, tc, tt);
        }
    }
    sum * MINUS_I * 0.5
}

/// Four-term first-order correlation of the CNOT network behind the analyzers (`K = 1`).
pub fn g1_polarized(
    geometry: &PathGeometry,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    pol: &PolarizationSettings,
) -> Complex64 {
    let eff = EffectiveTimes::new(geometry, detection);
    // kernel without the mean rate, which is factored out front
    let kappa = |tc: f64, tt: f64| {
        let tau = tc - tt;
        let x = tau * profile.delta_omega;
        Complex64::from_polar((-0.5 * x * x).exp(), profile.omega0 * tau)
    };
    let (cc, sc) = (
        pol.theta_c.cos() * pol.phi_c.cos(),
        pol.theta_c.sin() * pol.phi_c.sin(),
    );
    let keep = (pol.theta_t - pol.phi_t).cos();
    let flip = (pol.theta_t + pol.phi_t).sin();
    let sum = kappa(eff.control_short, eff.target_short) * (cc * keep)
        + kappa(eff.control_short, eff.target_long) * (cc * flip)
        + kappa(eff.control_long, eff.target_short) * (sc * keep)
        + kappa(eff.control_long, eff.target_long) * (sc * flip);
    sum * MINUS_I * (0.25 * profile.mean_rate)
}

/// `G1(t_a, t_b)` between two detectors from their path expansions.
pub fn g1_between(
    a: &DetectorResponse,
    t_a: f64,
    b: &DetectorResponse,
    t_b: f64,
    profile: &SpectralProfile,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for &(ca, da) in &a.terms {
        for &(cb, db) in &b.terms {
            sum += ca.conj() * cb * gaussian_kernel(profile, t_a - da, t_b - db);
        }
    }
    sum
}

/// Closed-form `G1` matrix `G[i][j] = G1(t_i, t_j)` for every detector pair.
pub fn g1_matrix(
    spec: &NetworkSpec,
    times: &[f64],
    profile: &SpectralProfile,
    analyzers: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let responses = spec.detector_responses(analyzers)?;
    if times.len() != responses.len() {
        return Err(Error::Configuration(format!(
            "{} detection times for {} detectors",
            times.len(),
            responses.len()
        )));
    }
    Ok((0..responses.len())
        .map(|i| {
            (0..responses.len())
                .map(|j| g1_between(&responses[i], times[i], &responses[j], times[j], profile))
                .collect()
        })
        .collect())
}

/// `<dn_C dn_T>` up to the detector constant: `|G1|^2`.
pub fn fluctuation_correlator(g1: Complex64) -> f64 {
    g1.norm_sqr()
}

/// Second-order correlation split into its background and interference parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct G2Parts {
    /// `G1(t_C, t_C) G1(t_T, t_T)`
    pub background: f64,
    /// `|G1(t_C, t_T)|^2`
    pub interference: f64,
}

impl G2Parts {
    pub fn from_g1(g_cc: Complex64, g_tt: Complex64, g_ct: Complex64) -> Self {
        Self {
            background: g_cc.re * g_tt.re,
            interference: fluctuation_correlator(g_ct),
        }
    }

    pub fn total(&self) -> f64 {
        self.background + self.interference
    }
}

/// Closed-form `G2(t_C, t_T)` of any two-detector network.
pub fn g2(
    spec: &NetworkSpec,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    analyzers: &[f64],
) -> Result<G2Parts> {
    let g = g1_matrix(spec, &[detection.t_c, detection.t_t], profile, analyzers)?;
    Ok(G2Parts::from_g1(g[0][0], g[1][1], g[0][1]))
}

/// Normalization of the polarized fringe relative to `r^2` (`K = 1`).
pub const POLARIZED_NORM: f64 = 1.0 / 16.0;

/// Constant `a` of the scalar path-pair contributions (`K = 1`).
pub const PAIR_CONSTANT: f64 = 0.5;

/// Fringe predicted when only the `(L_C, L_T)` and `(S_C, S_T)` pairs interfere.
///
/// Refuses configurations that fail the regime check.
pub fn regime_fringe(
    geometry: &PathGeometry,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    polarization: Option<&PolarizationSettings>,
    thresholds: &RegimeThresholds,
) -> Result<CorrelationResult> {
    let report = check_regime(geometry, detection, profile, thresholds);
    if !report.in_regime {
        return Err(Error::RegimeViolation(Box::new(report)));
    }
    let phase = relative_phase(geometry, profile);
    let r2 = profile.mean_rate * profile.mean_rate;
    let value = match polarization {
        None => 2.0 * PAIR_CONSTANT * PAIR_CONSTANT * r2 * (1.0 + phase.cos()),
        Some(p) => r2 * POLARIZED_NORM * polarized_fringe_shape(p, phase),
    };
    Ok(CorrelationResult {
        value,
        method: Method::RegimeApprox,
        stat_error: 0.0,
        regime: Some(report),
    })
}

/// `|cos pC cos tC cos(pT - tT) + e^{i phase} sin pC sin tC sin(pT + tT)|^2`
pub fn polarized_fringe_shape(p: &PolarizationSettings, phase: f64) -> f64 {
    let keep = p.phi_c.cos() * p.theta_c.cos() * (p.phi_t - p.theta_t).cos();
    let flip = p.phi_c.sin() * p.theta_c.sin() * (p.phi_t + p.theta_t).sin();
    (Complex64::new(keep, 0.0) + Complex64::from_polar(flip, phase)).norm_sqr()
}

/// Outcome probability of an ideal CNOT on `|phi_C>|phi_T>` measured along `(theta_C, theta_T)`.
pub fn p_cnot(p: &PolarizationSettings) -> f64 {
    polarized_fringe_shape(p, 0.0)
}

/// Relative deviation of the normalized regime fringe from the CNOT probability.
///
/// Meaningful when the relative phase is negligible; at larger phases the
/// deviation measures how far the simulation departs from the gate table.
pub fn cnot_consistency(
    polarization: &PolarizationSettings,
    geometry: &PathGeometry,
    detection: &DetectionSettings,
    profile: &SpectralProfile,
    thresholds: &RegimeThresholds,
) -> Result<f64> {
    let fringe = regime_fringe(geometry, detection, profile, Some(polarization), thresholds)?;
    let normalized = fringe.value / (profile.mean_rate * profile.mean_rate * POLARIZED_NORM);
    let p = p_cnot(polarization);
    Ok((normalized - p).abs() / p.max(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn profile(omega0: f64, rate: f64) -> SpectralProfile {
        SpectralProfile::new(omega0, 1.0, rate).unwrap()
    }

    /// In-regime geometry with relative phase `phase` (control long arm shifted).
    fn regime_geometry(omega0: f64, phase: f64) -> PathGeometry {
        PathGeometry::new(100.0 + phase / omega0, 0.0, 100.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let p = SpectralProfile::new(7.0, 2.0, 3.0).unwrap();
        assert_eq!(gaussian_kernel(&p, 1.5, 1.5), Complex64::new(3.0, 0.0));
        let k = gaussian_kernel(&p, 5.0, 0.0);
        assert_relative_eq!(k.norm(), 3.0 * (-50.0f64).exp(), max_relative = 1e-12);
        let a = gaussian_kernel(&p, 0.3, -0.4);
        let b = gaussian_kernel(&p, -0.4, 0.3);
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn scalar_in_phase_and_out_of_phase() {
        let p = profile(1000.0, 2.0);
        let det = DetectionSettings::equal_times(0.0);
        let g = g1_two_path(&regime_geometry(1000.0, 0.0), &det, &p);
        assert_relative_eq!(fluctuation_correlator(g), 4.0, max_relative = 1e-12);
        let g = g1_two_path(&regime_geometry(1000.0, PI), &det, &p);
        assert!(fluctuation_correlator(g) <= 4.0 * 1e-6);
    }

    #[test]
    fn scalar_detection_mismatch_suppresses_everything() {
        let p = profile(1000.0, 1.0);
        let g = g1_two_path(&regime_geometry(1000.0, 0.0), &DetectionSettings::new(10.0, 0.0), &p);
        assert!(fluctuation_correlator(g) < 1e-40);
    }

    #[test]
    fn polarized_trivial_geometry() {
        let p = profile(3.0, 1.0);
        let g = PathGeometry::new(0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let v = g1_polarized(&g, &DetectionSettings::equal_times(0.0), &p, &PolarizationSettings::default());
        assert!((v - Complex64::new(0.0, -0.25)).norm() < 1e-15);
        assert_relative_eq!(fluctuation_correlator(v), 1.0 / 16.0, max_relative = 1e-14);
    }

    #[test]
    fn polarized_bell_pattern() {
        let p = profile(1000.0, 1.0);
        let g = regime_geometry(1000.0, 0.0);
        let det = DetectionSettings::equal_times(0.0);
        for &(tc, tt) in &[(0.0, 0.0), (0.3, -0.2), (1.0, 2.5), (FRAC_PI_2, 0.0)] {
            let pol = PolarizationSettings::new(FRAC_PI_4, 0.0, tc, tt);
            let v = fluctuation_correlator(g1_polarized(&g, &det, &p, &pol)) / POLARIZED_NORM;
            let expected = 0.5 * (tc - tt).cos().powi(2);
            assert!((v - expected).abs() < 1e-6, "{tc} {tt}: {v} vs {expected}");
        }
    }

    #[test]
    fn fluctuation_correlator_examples() {
        assert_eq!(fluctuation_correlator(Complex64::new(0.0, 0.0)), 0.0);
        assert_relative_eq!(fluctuation_correlator(Complex64::new(0.0, -2.5)), 6.25);
        let g = Complex64::new(0.3, -1.2);
        let rotated = g * Complex64::from_polar(1.0, 0.77);
        assert_relative_eq!(fluctuation_correlator(g), fluctuation_correlator(rotated), max_relative = 1e-14);
    }

    #[test]
    fn g2_background_and_visibility() {
        let p = profile(1000.0, 1.0);
        let det = DetectionSettings::equal_times(0.0);
        let spec = NetworkSpec::two_path_scalar(regime_geometry(1000.0, 0.0));
        let parts = g2(&spec, &det, &p, &[]).unwrap();
        assert_relative_eq!(parts.background, 1.0, max_relative = 1e-12);
        assert_relative_eq!(parts.total(), 2.0, max_relative = 1e-12);
        let spec = NetworkSpec::two_path_scalar(regime_geometry(1000.0, PI));
        let low = g2(&spec, &det, &p, &[]).unwrap().total();
        assert_relative_eq!(low, 1.0, max_relative = 1e-9);
        assert_relative_eq!((2.0 - low) / (2.0 + low), 1.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn regime_fringe_examples() {
        let p = profile(1000.0, 3.0);
        let det = DetectionSettings::equal_times(0.0);
        let th = RegimeThresholds::default();
        let r = regime_fringe(&regime_geometry(1000.0, 0.0), &det, &p, None, &th).unwrap();
        assert_relative_eq!(r.value, 9.0, max_relative = 1e-14);
        assert_eq!(r.method, Method::RegimeApprox);
        assert!(r.regime.as_ref().unwrap().in_regime);
        let r = regime_fringe(&regime_geometry(1000.0, PI), &det, &p, None, &th).unwrap();
        assert!(r.value < 1e-20);

        // pi phase, Bell preparation: shape cos^2(theta_C + theta_T) / 2
        for &(tc, tt) in &[(0.2, 0.9), (1.3, -0.4), (0.0, 0.0)] {
            let pol = PolarizationSettings::new(FRAC_PI_4, 0.0, tc, tt);
            let r = regime_fringe(&regime_geometry(1000.0, PI), &det, &p, Some(&pol), &th).unwrap();
            let shape = r.value / (9.0 * POLARIZED_NORM);
            assert!((shape - 0.5 * (tc + tt).cos().powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn regime_fringe_refuses_out_of_regime() {
        let p = profile(1000.0, 1.0);
        let err = regime_fringe(
            &regime_geometry(1000.0, 0.0),
            &DetectionSettings::new(1.0, 0.0),
            &p,
            None,
            &RegimeThresholds::default(),
        )
        .unwrap_err();
        match err {
            Error::RegimeViolation(report) => assert!(!report.in_regime),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn p_cnot_examples() {
        assert_relative_eq!(p_cnot(&PolarizationSettings::new(0.0, 0.0, 0.0, 0.0)), 1.0);
        let vh = PolarizationSettings::new(FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_2);
        assert_relative_eq!(p_cnot(&vh), 1.0, max_relative = 1e-15);
        for &(tc, tt) in &[(0.1, 0.2), (1.0, -1.0), (2.0, 0.5)] {
            let pol = PolarizationSettings::new(FRAC_PI_4, 0.0, tc, tt);
            assert_relative_eq!(p_cnot(&pol), 0.5 * (tc - tt).cos().powi(2), epsilon = 1e-15);
        }
    }

    #[test]
    fn cnot_truth_table() {
        let basis = [0.0, FRAC_PI_2];
        for (ci, &pc) in basis.iter().enumerate() {
            for (ti, &pt) in basis.iter().enumerate() {
                let out_t = basis[ti ^ ci];
                let flipped = basis[1 - (ti ^ ci)];
                assert!(p_cnot(&PolarizationSettings::new(pc, pt, pc, out_t)) > 1.0 - 1e-12);
                assert!(p_cnot(&PolarizationSettings::new(pc, pt, pc, flipped)) < 1e-12);
                assert!(p_cnot(&PolarizationSettings::new(pc, pt, basis[1 - ci], out_t)) < 1e-12);
            }
        }
    }

    #[test]
    fn cnot_consistency_basis_and_phase() {
        let p = profile(1000.0, 1.0);
        let det = DetectionSettings::equal_times(0.0);
        let th = RegimeThresholds::default();
        let basis = [0.0, FRAC_PI_2];
        for &pc in &basis {
            for &pt in &basis {
                for &tc in &basis {
                    for &tt in &basis {
                        let pol = PolarizationSettings::new(pc, pt, tc, tt);
                        if p_cnot(&pol) > 0.5 {
                            let dev = cnot_consistency(&pol, &regime_geometry(1000.0, 0.0), &det, &p, &th).unwrap();
                            assert!(dev < 1e-9);
                        }
                    }
                }
            }
        }
        let pol = PolarizationSettings::new(FRAC_PI_4, 0.3, 0.7, 0.2);
        let dev = cnot_consistency(&pol, &regime_geometry(1000.0, FRAC_PI_2), &det, &p, &th).unwrap();
        assert!(dev > 1e-3);
    }

    proptest! {
        #[test]
        fn cnot_consistency_random_angles(a in proptest::array::uniform4(-3.2f64..3.2)) {
            let p = profile(1000.0, 1.0);
            let pol = PolarizationSettings::new(a[0], a[1], a[2], a[3]);
            prop_assume!(p_cnot(&pol) > 1e-6);
            let dev = cnot_consistency(
                &pol, &regime_geometry(1000.0, 0.0), &DetectionSettings::equal_times(0.0), &p,
                &RegimeThresholds::default(),
            ).unwrap();
            prop_assert!(dev < 1e-9);
        }

        #[test]
        fn g2_exceeds_interference(
            l in proptest::array::uniform4(0.0f64..40.0), dt in -3.0f64..3.0,
            a in proptest::array::uniform4(-3.2f64..3.2), polarized in any::<bool>()
        ) {
            let p = profile(17.0, 1.3);
            let geometry = PathGeometry::new(l[0], l[1], l[2], l[3], 1.0).unwrap();
            let det = DetectionSettings::new(dt, 0.0);
            let (spec, analyzers) = if polarized {
                (NetworkSpec::cnot(geometry, a[0], a[1]), vec![a[2], a[3]])
            } else {
                (NetworkSpec::two_path_scalar(geometry), vec![])
            };
            let parts = g2(&spec, &det, &p, &analyzers).unwrap();
            prop_assert!(parts.background >= -1e-12);
            prop_assert!(parts.total() >= parts.interference - 1e-12);
        }

        #[test]
        fn explicit_forms_match_path_expansion(
            l in proptest::array::uniform4(0.0f64..40.0), dt in -3.0f64..3.0,
            a in proptest::array::uniform4(-3.2f64..3.2)
        ) {
            let p = profile(9.0, 0.8);
            let geometry = PathGeometry::new(l[0], l[1], l[2], l[3], 1.0).unwrap();
            let det = DetectionSettings::new(dt, 0.25);
            let times = [det.t_c, det.t_t];

            let scalar = g1_matrix(&NetworkSpec::two_path_scalar(geometry), &times, &p, &[]).unwrap();
            prop_assert!((scalar[0][1] - g1_two_path(&geometry, &det, &p)).norm() < 1e-12);

            let pol = PolarizationSettings::new(a[0], a[1], a[2], a[3]);
            let spec = NetworkSpec::cnot(geometry, pol.phi_c, pol.phi_t);
            let m = g1_matrix(&spec, &times, &p, &[pol.theta_c, pol.theta_t]).unwrap();
            prop_assert!((m[0][1] - g1_polarized(&geometry, &det, &p, &pol)).norm() < 1e-12);
        }

        #[test]
        fn regime_consistency(
            long in 60.0f64..400.0, short in 0.0f64..10.0, phase in 0.0f64..6.0,
            jitter in -0.015f64..0.015, a in proptest::array::uniform4(-3.2f64..3.2), polarized in any::<bool>()
        ) {
            let p = profile(500.0, 1.0);
            let th = RegimeThresholds::default();
            let geometry = PathGeometry::new(long + phase / 500.0 + jitter, short, long, short, 1.0).unwrap();
            let det = DetectionSettings::equal_times(0.0);
            prop_assume!(check_regime(&geometry, &det, &p, &th).in_regime);
            let pol = PolarizationSettings::new(a[0], a[1], a[2], a[3]);
            let (exact, scale, polarization) = if polarized {
                (fluctuation_correlator(g1_polarized(&geometry, &det, &p, &pol)), POLARIZED_NORM, Some(&pol))
            } else {
                (fluctuation_correlator(g1_two_path(&geometry, &det, &p)), 1.0, None)
            };
            let approx = regime_fringe(&geometry, &det, &p, polarization, &th).unwrap().value;
            prop_assert!((exact - approx).abs() < 1e-3 * scale);
        }

        #[test]
        fn phase_difference_law(delta in 0.0f64..50.0, phase in 0.0f64..6.0) {
            let p = profile(400.0, 1.0);
            let th = RegimeThresholds::default();
            let det = DetectionSettings::equal_times(0.0);
            let base = PathGeometry::new(100.0 + phase / 400.0, 3.0, 100.0, 3.0, 1.0).unwrap();
            let both = PathGeometry { l_c: base.l_c + delta, l_t: base.l_t + delta, ..base };
            let a = regime_fringe(&base, &det, &p, None, &th).unwrap().value;
            let b = regime_fringe(&both, &det, &p, None, &th).unwrap().value;
            prop_assert!((a - b).abs() < 1e-9);
            let small = delta * 1e-5;
            let only_c = PathGeometry { l_c: base.l_c + small, ..base };
            let c = regime_fringe(&only_c, &det, &p, None, &th).unwrap().value;
            let expected = 0.5 * (1.0 + (relative_phase(&base, &p) + 400.0 * small).cos());
            prop_assert!((c - expected).abs() < 1e-9);
        }
    }
}
