//! Closed-form and quadrature evaluation of the correlation quantities.
//!
//! Normalization follows the field-operator constant `K = 1`: the scalar
//! path-pair constant is `a = K^2 / 2 = 1/2` and the polarized fringe carries
//! `r^2 / 16`. Only ratios are physically meaningful.

mod closed_form;
mod n_order;
mod quadrature;

pub use closed_form::{
    cnot_consistency, fluctuation_correlator, g1_between, g1_matrix, g1_polarized, g1_two_path,
    g2, gaussian_kernel, p_cnot, polarized_fringe_shape, regime_fringe, G2Parts, PAIR_CONSTANT,
    POLARIZED_NORM,
};
pub use n_order::{
    cycle_sum, derangement_sum, n_order_fluctuation_correlator, NOrderCorrelator, EXTENSION_NOTE,
    MAX_DETECTORS,
};
pub use quadrature::{g1_quadrature, g1_quadrature_pair, g2_quadrature, QuadratureGrid};

use crate::error::{Error, Result};
use crate::model::RegimeReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    RegimeApprox,
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::RegimeApprox => "regime_approx",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// A correlation value with the engine that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    pub method: Method,
    /// Standard error; zero for deterministic engines.
    pub stat_error: f64,
    /// Regime check that licensed a `RegimeApprox` value.
    pub regime: Option<RegimeReport>,
}

impl CorrelationResult {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            stat_error: 0.0,
            regime: None,
        }
    }
}

/// Ordered `(parameter, value)` pairs from a one-parameter scan.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FringeScan {
    pub points: Vec<(f64, CorrelationResult)>,
}

impl FringeScan {
    pub fn from_values(params: &[f64], values: &[f64], method: Method) -> Self {
        Self {
            points: params
                .iter()
                .zip(values)
                .map(|(&p, &v)| (p, CorrelationResult::exact(v, method)))
                .collect(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|(_, r)| r.value)
    }

    pub fn visibility(&self) -> Result<f64> {
        visibility(self)
    }
}

/// `(max - min) / (max + min)` of the scanned values.
pub fn visibility(scan: &FringeScan) -> Result<f64> {
    if scan.points.is_empty() {
        return Err(Error::UndefinedVisibility(0.0));
    }
    visibility_of(scan.values())
}

/// Visibility of a plain list of fringe values.
pub fn visibility_of_values(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::UndefinedVisibility(0.0));
    }
    visibility_of(values.iter().copied())
}

pub(crate) fn visibility_of(values: impl Iterator<Item = f64>) -> Result<f64> {
    let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let denom = max + min;
    if !(denom > 0.0) {
        return Err(Error::UndefinedVisibility(denom));
    }
    Ok((max - min) / denom)
}

/// Phase of the first Fourier harmonic of a scan over one full period.
///
/// For samples of `A + B cos(p + shift)` on a uniform grid covering
/// `[0, 2 pi)` this returns `shift` wrapped into `(-pi, pi]`.
pub fn fringe_phase(params: &[f64], values: &[f64]) -> f64 {
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (&p, &v) in params.iter().zip(values) {
        acc += num_complex::Complex64::from_polar(v, -p);
    }
    acc.arg()
}
