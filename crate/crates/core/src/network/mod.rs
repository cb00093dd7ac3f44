//! Frequency-dependent transfer matrices for the three interferometer
//! families: the scalar HBT beam splitter followed by two unbalanced
//! Mach-Zehnder stages, the polarization-encoded CNOT interferometer, and
//! the N-channel generalization.
//!
//! Every network is described two ways. The matrix route builds the
//! transfer matrix at a given frequency by explicit composition. The path
//! route lists, for each detector, the constant amplitudes multiplying
//! `exp(i omega l / c)` for each optical path `l`. Closed forms are built on
//! the path route; quadrature and Monte Carlo use the matrix route.

mod jones;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use jones::{analyze, horizontal, JonesMatrix, JonesVector};

use crate::error::{Error, Result};
use crate::model::PathGeometry;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(i omega length / c)`
fn propagation(omega: f64, length: f64, c: f64) -> Complex64 {
    Complex64::from_polar(1.0, omega * length / c)
}

/// Which polarization-dependent Mach-Zehnder stage a channel passes through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    /// Polarizing MZ: `H` takes the short arm, `V` the long arm.
    Control,
    /// Non-polarizing MZ with a half-wave `H <-> V` flip in the long arm.
    Target,
}

/// One P-type block: a stage kind plus its two arm lengths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PTypeStage {
    pub kind: StageKind,
    pub long: f64,
    pub short: f64,
}

impl PTypeStage {
    pub fn control(long: f64, short: f64) -> Self {
        Self {
            kind: StageKind::Control,
            long,
            short,
        }
    }

    pub fn target(long: f64, short: f64) -> Self {
        Self {
            kind: StageKind::Target,
            long,
            short,
        }
    }

    /// Constant Jones matrices multiplying the short- and long-arm propagators.
    pub fn arm_terms(&self) -> [(JonesMatrix, f64); 2] {
        match self.kind {
            StageKind::Control => [
                (JonesMatrix::from_real(1.0, 0.0, 0.0, 0.0), self.short),
                (JonesMatrix::from_real(0.0, 0.0, 0.0, 1.0), self.long),
            ],
            StageKind::Target => [
                (JonesMatrix::identity().scale(0.5.into()), self.short),
                (JonesMatrix::flip().scale(0.5.into()), self.long),
            ],
        }
    }

    pub fn at(&self, omega: f64, c: f64) -> JonesMatrix {
        match self.kind {
            StageKind::Control => JonesMatrix::diag(
                propagation(omega, self.short, c),
                propagation(omega, self.long, c),
            ),
            StageKind::Target => {
                let long = JonesMatrix::flip().scale(propagation(omega, self.long, c));
                let short = JonesMatrix::identity().scale(propagation(omega, self.short, c));
                (long + short).scale(0.5.into())
            }
        }
    }
}

/// `[[cos phi, sin phi], [sin phi, -cos phi]]`
pub fn rotation(phi: f64) -> JonesMatrix {
    JonesMatrix::rotation(phi)
}

/// `diag(exp(i w S_C / c), exp(i w L_C / c))`
pub fn control_block(geometry: &PathGeometry, omega: f64) -> JonesMatrix {
    PTypeStage::control(geometry.l_c, geometry.s_c).at(omega, geometry.c)
}

/// `(exp(i w L_T / c) F + exp(i w S_T / c)) / 2`
pub fn target_block(geometry: &PathGeometry, omega: f64) -> JonesMatrix {
    PTypeStage::target(geometry.l_t, geometry.s_t).at(omega, geometry.c)
}

/// Complex matrix of `detectors x inputs` Jones blocks evaluated at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    pub omega: f64,
    pub matrix: DMatrix<Complex64>,
}

impl TransferMatrix {
    pub fn new(omega: f64, matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(matrix.nrows().is_multiple_of(2) && matrix.ncols().is_multiple_of(2));
        Self { omega, matrix }
    }

    pub fn detectors(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn inputs(&self) -> usize {
        self.matrix.ncols() / 2
    }

    pub fn block(&self, detector: usize, input: usize) -> JonesMatrix {
        let m = &self.matrix;
        let (r, c) = (2 * detector, 2 * input);
        JonesMatrix::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)])
    }

    /// Only the first input port carries light; keep its block column.
    pub fn first_block_column(&self) -> TransferMatrix {
        TransferMatrix {
            omega: self.omega,
            matrix: self.matrix.columns(0, 2).into_owned(),
        }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.matrix.clone().singular_values().iter().copied().collect()
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    /// Largest entry of `|M^dagger M - 1|` (square matrices only).
    pub fn unitarity_error(&self) -> f64 {
        let n = self.matrix.ncols();
        let g = self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(n, n);
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Amplitude reaching detector `d` through analyzer `theta` from `H` light in port 0.
    pub fn analyzed_amplitude(&self, detector: usize, theta: f64) -> Complex64 {
        let b = self.block(detector, 0);
        analyze(theta, &b.apply(&horizontal()))
    }
}

fn block_matrix(blocks: &[Vec<JonesMatrix>]) -> DMatrix<Complex64> {
    let rows = blocks.len();
    let cols = blocks.first().map_or(0, Vec::len);
    DMatrix::from_fn(2 * rows, 2 * cols, |r, c| blocks[r / 2][c / 2].get(r % 2, c % 2))
}

/// Balanced two-port beam splitter `(1/sqrt 2) [[i, 1], [1, i]]`.
pub fn beam_splitter() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[I, 1.0.into(), 1.0.into(), I]) * Complex64::from(FRAC_1_SQRT_2)
}

/// Symmetric N-port splitter: the discrete Fourier matrix, except for
/// `N = 2` where the balanced beam-splitter convention is kept.
pub fn symmetric_splitter(n: usize) -> DMatrix<Complex64> {
    if n == 2 {
        return beam_splitter();
    }
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(norm, 2.0 * PI * (j * k) as f64 / n as f64)
    })
}

/// Splitter acting identically on both polarizations.
fn splitter_with_polarization(n: usize) -> DMatrix<Complex64> {
    let s = symmetric_splitter(n);
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if r % 2 == c % 2 {
            s[(r / 2, c / 2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn block_diagonal(blocks: &[JonesMatrix]) -> DMatrix<Complex64> {
    let grid: Vec<Vec<JonesMatrix>> = (0..blocks.len())
        .map(|r| {
            (0..blocks.len())
                .map(|c| if r == c { blocks[r] } else { JonesMatrix::zero() })
                .collect()
        })
        .collect();
    block_matrix(&grid)
}

/// `diag(R_phi_c, R_phi_t) . U_BS`
pub fn prep_transformation(phi_c: f64, phi_t: f64) -> TransferMatrix {
    let m = block_diagonal(&[rotation(phi_c), rotation(phi_t)]) * splitter_with_polarization(2);
    TransferMatrix::new(0.0, m)
}

/// Per-channel data for the N-channel network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    /// Preparation rotation angle applied after the splitter.
    pub rotation: f64,
    pub stage: PTypeStage,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkSpec {
    /// Beam splitter followed by two unbalanced Mach-Zehnder stages, no polarization.
    TwoPathScalar { geometry: PathGeometry },
    /// Polarization preparation, control and target stages.
    CnotPolarization {
        geometry: PathGeometry,
        phi_c: f64,
        phi_t: f64,
    },
    /// Symmetric splitter, one rotation and one P-type stage per channel.
    NOrder { channels: Vec<ChannelSpec>, c: f64 },
}

impl NetworkSpec {
    pub fn two_path_scalar(geometry: PathGeometry) -> Self {
        NetworkSpec::TwoPathScalar { geometry }
    }

    pub fn cnot(geometry: PathGeometry, phi_c: f64, phi_t: f64) -> Self {
        NetworkSpec::CnotPolarization {
            geometry,
            phi_c,
            phi_t,
        }
    }

    /// Builds an N-channel network from parallel per-channel lists.
    pub fn n_order(rotations: &[f64], stages: &[PTypeStage], c: f64) -> Result<Self> {
        if rotations.len() != stages.len() {
            return Err(Error::Configuration(format!(
                "n-order network has {} rotation angles but {} stages",
                rotations.len(),
                stages.len()
            )));
        }
        let spec = NetworkSpec::NOrder {
            channels: rotations
                .iter()
                .zip(stages)
                .map(|(&rotation, &stage)| ChannelSpec { rotation, stage })
                .collect(),
            c,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The N-channel equivalent of the CNOT interferometer.
    pub fn cnot_as_n_order(geometry: &PathGeometry, phi_c: f64, phi_t: f64) -> Self {
        NetworkSpec::NOrder {
            channels: vec![
                ChannelSpec {
                    rotation: phi_c,
                    stage: PTypeStage::control(geometry.l_c, geometry.s_c),
                },
                ChannelSpec {
                    rotation: phi_t,
                    stage: PTypeStage::target(geometry.l_t, geometry.s_t),
                },
            ],
            c: geometry.c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NetworkSpec::TwoPathScalar { geometry } | NetworkSpec::CnotPolarization { geometry, .. } => {
                geometry.validate()
            }
            NetworkSpec::NOrder { channels, c } => {
                if channels.len() < 2 {
                    return Err(Error::Configuration(format!(
                        "n-order network needs at least 2 channels, got {}",
                        channels.len()
                    )));
                }
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidGeometry(format!(
                        "propagation speed must be positive, got {c}"
                    )));
                }
                for ch in channels {
                    if !(ch.stage.long >= 0.0 && ch.stage.short >= 0.0)
                        || !ch.stage.long.is_finite()
                        || !ch.stage.short.is_finite()
                    {
                        return Err(Error::InvalidGeometry(format!(
                            "channel arm lengths must be non-negative, got {:?}",
                            ch.stage
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn detector_count(&self) -> usize {
        match self {
            NetworkSpec::TwoPathScalar { .. } | NetworkSpec::CnotPolarization { .. } => 2,
            NetworkSpec::NOrder { channels, .. } => channels.len(),
        }
    }

    pub fn is_polarized(&self) -> bool {
        !matches!(self, NetworkSpec::TwoPathScalar { .. })
    }

    pub fn propagation_speed(&self) -> f64 {
        match self {
            NetworkSpec::TwoPathScalar { geometry } | NetworkSpec::CnotPolarization { geometry, .. } => {
                geometry.c
            }
            NetworkSpec::NOrder { c, .. } => *c,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            NetworkSpec::TwoPathScalar { .. } => "two_path_scalar",
            NetworkSpec::CnotPolarization { .. } => "cnot_polarization",
            NetworkSpec::NOrder { .. } => "n_order",
        }
    }

    fn check_analyzers(&self, analyzers: &[f64]) -> Result<()> {
        if self.is_polarized() && analyzers.len() != self.detector_count() {
            return Err(Error::Configuration(format!(
                "{} network needs {} analyzer angles, got {}",
                self.variant_name(),
                self.detector_count(),
                analyzers.len()
            )));
        }
        Ok(())
    }

    /// Field at every detector as a Jones vector (before the analyzer), via
    /// the transfer matrix. The scalar network puts its field in the `H` slot.
    pub fn field_jones(&self, omega: f64) -> Result<Vec<JonesVector>> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self {
            NetworkSpec::TwoPathScalar { geometry } => {
                let coeffs = scalar_two_path_coefficients(geometry, omega);
                coeffs
                    .detector
                    .iter()
                    .map(|&a| JonesVector::new(a * SCALAR_FIELD_GAIN, zero))
                    .collect()
            }
            NetworkSpec::CnotPolarization { .. } => {
                let m = total_matrix(self, omega)?;
                (0..2).map(|d| m.block(d, 0).apply(&horizontal()) * I).collect()
            }
            NetworkSpec::NOrder { .. } => {
                let m = n_order_matrix(self, omega)?;
                (0..m.detectors())
                    .map(|d| m.block(d, 0).apply(&horizontal()) * I)
                    .collect()
            }
        })
    }

    /// Projection weights `(w_H, w_V)` of each detector's analyzer.
    pub fn analyzer_weights(&self, analyzers: &[f64]) -> Result<Vec<[f64; 2]>> {
        self.check_analyzers(analyzers)?;
        Ok(if self.is_polarized() {
            analyzers.iter().map(|t| [t.cos(), t.sin()]).collect()
        } else {
            vec![[1.0, 0.0]; self.detector_count()]
        })
    }

    /// Field coefficients `m_d(omega)` for every detector, via the transfer matrix.
    ///
    /// For polarized networks the analyzer angles select the detected
    /// polarization; the scalar network ignores them.
    pub fn field_coefficients(&self, omega: f64, analyzers: &[f64]) -> Result<Vec<Complex64>> {
        let weights = self.analyzer_weights(analyzers)?;
        Ok(self
            .field_jones(omega)?
            .iter()
            .zip(&weights)
            .map(|(v, w)| v[0] * w[0] + v[1] * w[1])
            .collect())
    }

    /// Path expansion of every detector's field coefficient.
    pub fn detector_responses(&self, analyzers: &[f64]) -> Result<Vec<DetectorResponse>> {
        self.check_analyzers(analyzers)?;
        Ok(match self {
            NetworkSpec::TwoPathScalar { geometry } => {
                let c = geometry.c;
                let amp = FRAC_1_SQRT_2;
                vec![
                    DetectorResponse::new(vec![
                        (Complex64::new(-amp, 0.0), geometry.l_c / c),
                        (Complex64::new(-amp, 0.0), geometry.s_c / c),
                    ]),
                    DetectorResponse::new(vec![
                        (Complex64::new(0.0, amp), geometry.l_t / c),
                        (Complex64::new(0.0, amp), geometry.s_t / c),
                    ]),
                ]
            }
            NetworkSpec::CnotPolarization {
                geometry,
                phi_c,
                phi_t,
            } => NetworkSpec::cnot_as_n_order(geometry, *phi_c, *phi_t).detector_responses(analyzers)?,
            NetworkSpec::NOrder { channels, c } => {
                let splitter = symmetric_splitter(channels.len());
                channels
                    .iter()
                    .enumerate()
                    .map(|(d, ch)| {
                        let input = rotation(ch.rotation).apply(&horizontal()) * splitter[(d, 0)];
                        let terms = ch
                            .stage
                            .arm_terms()
                            .iter()
                            .map(|(jones, length)| {
                                (I * analyze(analyzers[d], &jones.apply(&input)), length / c)
                            })
                            .collect();
                        DetectorResponse::new(terms)
                    })
                    .collect()
            }
        })
    }
}

/// `K` convention for the scalar network: field coefficient = gain x physical amplitude.
pub const SCALAR_FIELD_GAIN: f64 = 2.0;

/// Physical amplitudes of the scalar HBT + Mach-Zehnder network, per detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarCoefficients {
    /// Amplitude reaching detector C (index 0) and T (index 1).
    pub detector: [Complex64; 2],
    /// Amplitude leaving each Mach-Zehnder through its unmonitored port.
    pub discarded: [Complex64; 2],
}

/// Includes the `1/sqrt 2` of the first beam splitter and the two `1/sqrt 2`
/// of each Mach-Zehnder; the global phases `-1` (C) and `i` (T) follow the
/// field-operator convention used by the closed forms.
pub fn scalar_two_path_coefficients(geometry: &PathGeometry, omega: f64) -> ScalarCoefficients {
    let c = geometry.c;
    let norm = 0.5 * FRAC_1_SQRT_2;
    let phases = [Complex64::new(-1.0, 0.0), I];
    let arms = [(geometry.l_c, geometry.s_c), (geometry.l_t, geometry.s_t)];
    let mut detector = [Complex64::new(0.0, 0.0); 2];
    let mut discarded = detector;
    for d in 0..2 {
        let long = propagation(omega, arms[d].0, c);
        let short = propagation(omega, arms[d].1, c);
        detector[d] = phases[d] * norm * (long + short);
        discarded[d] = phases[d] * norm * (long - short);
    }
    ScalarCoefficients {
        detector,
        discarded,
    }
}

/// Amplitude each detector arm receives from the first beam splitter.
pub const ARM_FACTOR: f64 = FRAC_1_SQRT_2;

/// `P . U_prep` for the CNOT interferometer.
pub fn total_matrix(spec: &NetworkSpec, omega: f64) -> Result<TransferMatrix> {
    let NetworkSpec::CnotPolarization {
        geometry,
        phi_c,
        phi_t,
    } = spec
    else {
        return Err(Error::Configuration(format!(
            "total_matrix needs a cnot_polarization network, got {}",
            spec.variant_name()
        )));
    };
    let p = block_diagonal(&[control_block(geometry, omega), target_block(geometry, omega)]);
    let prep = prep_transformation(*phi_c, *phi_t);
    Ok(TransferMatrix::new(omega, p * prep.matrix))
}

/// Full `2N x 2N` matrix of the N-channel network.
pub fn n_order_full_matrix(spec: &NetworkSpec, omega: f64) -> Result<TransferMatrix> {
    spec.validate()?;
    let NetworkSpec::NOrder { channels, c } = spec else {
        return Err(Error::Configuration(format!(
            "n_order_matrix needs an n_order network, got {}",
            spec.variant_name()
        )));
    };
    let n = channels.len();
    let stages: Vec<JonesMatrix> = channels.iter().map(|ch| ch.stage.at(omega, *c)).collect();
    let rotations: Vec<JonesMatrix> = channels.iter().map(|ch| rotation(ch.rotation)).collect();
    let m = block_diagonal(&stages) * block_diagonal(&rotations) * splitter_with_polarization(n);
    Ok(TransferMatrix::new(omega, m))
}

/// First block column of the N-channel network (light enters port 0 only).
pub fn n_order_matrix(spec: &NetworkSpec, omega: f64) -> Result<TransferMatrix> {
    Ok(n_order_full_matrix(spec, omega)?.first_block_column())
}

/// Field coefficient of one detector as `sum_j amplitude_j exp(i omega delay_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorResponse {
    /// `(amplitude, path delay l / c)`
    pub terms: Vec<(Complex64, f64)>,
}

impl DetectorResponse {
    pub fn new(terms: Vec<(Complex64, f64)>) -> Self {
        Self { terms }
    }

    pub fn at(&self, omega: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(a, delay)| a * Complex64::from_polar(1.0, omega * delay))
            .sum()
    }

    pub fn delays(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|&(_, d)| d)
    }
}
