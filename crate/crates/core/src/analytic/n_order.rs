//! Fluctuation correlations among N detectors.
//!
//! Thermal light is a circular complex Gaussian field, so every moment of
//! the detected intensities is a permutation sum over the pairwise
//! first-order correlations `G[i][j] = G1(t_i, t_j)`:
//!
//! * `<prod_i dn_i>` (central moment) sums over permutations with no fixed
//!   point,
//! * the joint cumulant sums over single N-cycles only.
//!
//! The two coincide for `N = 2` and `N = 3`. Neither is a closed form the
//! two-detector analysis provides for `N > 2`; both follow from Gaussian
//! moment factorization and are labelled as such in reports.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SpectralProfile;
use crate::network::NetworkSpec;

use super::closed_form::g1_matrix;

pub const MAX_DETECTORS: usize = 8;

pub const EXTENSION_NOTE: &str = "gaussian-moment extension for N > 2";

fn check_square(g: &[Vec<Complex64>]) -> Result<usize> {
    let n = g.len();
    if n > MAX_DETECTORS {
        return Err(Error::ComplexityLimit {
            n,
            max: MAX_DETECTORS,
        });
    }
    if g.iter().any(|row| row.len() != n) {
        return Err(Error::Configuration("correlation matrix is not square".into()));
    }
    Ok(n)
}

/// Visits every permutation of `0..n` (as `perm[i] = sigma(i)`).
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    fn recurse(k: usize, perm: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == perm.len() {
            visit(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            recurse(k + 1, perm, visit);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    recurse(0, &mut perm, &mut visit);
}

fn is_single_cycle(perm: &[usize]) -> bool {
    let mut i = perm[0];
    let mut len = 1;
    while i != 0 {
        i = perm[i];
        len += 1;
    }
    len == perm.len()
}

fn permutation_sum(g: &[Vec<Complex64>], keep: impl Fn(&[usize]) -> bool) -> Result<f64> {
    let n = check_square(g)?;
    if n < 2 {
        return Err(Error::Configuration(format!("need at least 2 detectors, got {n}")));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for_each_permutation(n, |perm| {
        if keep(perm) {
            sum += perm
                .iter()
                .enumerate()
                .map(|(i, &j)| g[i][j])
                .product::<Complex64>();
        }
    });
    Ok(sum.re)
}

/// Sum over single N-cycles of `prod_i G[i][sigma(i)]` (joint cumulant).
pub fn cycle_sum(g: &[Vec<Complex64>]) -> Result<f64> {
    permutation_sum(g, is_single_cycle)
}

/// Sum over fixed-point-free permutations (central product moment).
pub fn derangement_sum(g: &[Vec<Complex64>]) -> Result<f64> {
    permutation_sum(g, |perm| perm.iter().enumerate().all(|(i, &j)| i != j))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NOrderCorrelator {
    /// `<prod_i dn_i>`, the quantity the Monte Carlo estimator measures.
    pub product_moment: f64,
    /// Joint cumulant (single-cycle sum).
    pub cycle_sum: f64,
    pub g1: Vec<Vec<Complex64>>,
    pub note: &'static str,
}

/// N-detector fluctuation correlator of an N-channel network.
pub fn n_order_fluctuation_correlator(
    spec: &NetworkSpec,
    times: &[f64],
    profile: &SpectralProfile,
    analyzers: &[f64],
) -> Result<NOrderCorrelator> {
    let n = spec.detector_count();
    if n > MAX_DETECTORS {
        return Err(Error::ComplexityLimit {
            n,
            max: MAX_DETECTORS,
        });
    }
    let g1 = g1_matrix(spec, times, profile, analyzers)?;
    Ok(NOrderCorrelator {
        product_moment: derangement_sum(&g1)?,
        cycle_sum: cycle_sum(&g1)?,
        g1,
        note: EXTENSION_NOTE,
    })
}
