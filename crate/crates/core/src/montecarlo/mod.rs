//! Stochastic-field engine.
//!
//! The thermal state has a positive Gaussian P-function, so each trial draws
//! one classical amplitude per spectral mode, propagates it through the
//! network's transfer matrix and records the intensity at every detector.
//! All observables here are normally ordered, so no quantum correction is
//! needed.
//!
//! Reproducibility: batch `b` draws from a ChaCha8 stream selected by
//! `(seed, b)`; batches run on a rayon pool of any size and are reduced in
//! batch order, so the output is bit-identical for every worker count.
//! Intensity fluctuations are taken around the batch's own sample mean,
//! which biases the product moment by `O(1 / batch size)`.

mod grid;

pub use grid::{ModeGrid, DEFAULT_HALF_SPAN, DEFAULT_MODES, MIN_MODES, REVIVAL_MARGIN};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SpectralProfile;
use crate::network::NetworkSpec;

pub const MIN_BATCHES: u64 = 2;
pub const MIN_TRIALS_PER_BATCH: u64 = 100;

/// One draw of the classical mode amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub alpha: Vec<Complex64>,
}

impl FieldSample {
    pub fn zeros(modes: usize) -> Self {
        Self {
            alpha: vec![Complex64::new(0.0, 0.0); modes],
        }
    }
}

/// Per-mode standard deviations `sqrt(n(nu_k) dnu / 2)` of each quadrature.
fn mode_scales(grid: &ModeGrid, profile: &SpectralProfile) -> Vec<f64> {
    grid.nu
        .iter()
        .map(|&nu| (profile.density_rotating(nu) * grid.spacing / 2.0).sqrt())
        .collect()
}

fn fill_sample<R: Rng>(scales: &[f64], rng: &mut R, out: &mut [Complex64]) {
    for (a, &s) in out.iter_mut().zip(scales) {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        *a = Complex64::new(s * x, s * y);
    }
}

/// Circular complex Gaussian amplitudes with `<|alpha_k|^2> = n(nu_k) dnu`.
pub fn sample_field<R: Rng>(grid: &ModeGrid, profile: &SpectralProfile, rng: &mut R) -> FieldSample {
    let scales = mode_scales(grid, profile);
    let mut sample = FieldSample::zeros(grid.len());
    fill_sample(&scales, rng, &mut sample.alpha);
    sample
}

/// Linear map from mode amplitudes to the `(H, V)` field at each detector.
///
/// `weights[d][p][k] = m_{d,p}(omega_k) exp(-i omega_k t_d)`.
#[derive(Clone, Debug)]
pub struct DetectionWeights {
    weights: Vec<[Vec<Complex64>; 2]>,
    polarized: bool,
}

impl DetectionWeights {
    pub fn new(
        spec: &NetworkSpec,
        times: &[f64],
        profile: &SpectralProfile,
        grid: &ModeGrid,
    ) -> Result<Self> {
        let n = spec.detector_count();
        if times.len() != n {
            return Err(Error::Configuration(format!(
                "{} detection times for {n} detectors",
                times.len()
            )));
        }
        let mut weights: Vec<[Vec<Complex64>; 2]> = (0..n)
            .map(|_| [Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len())])
            .collect();
        for &nu in &grid.nu {
            let omega = nu + profile.omega0;
            let fields = spec.field_jones(omega)?;
            for (d, v) in fields.iter().enumerate() {
                let carrier = Complex64::from_polar(1.0, -profile.omega0 * times[d])
                    * Complex64::from_polar(1.0, -nu * times[d]);
                weights[d][0].push(v[0] * carrier);
                weights[d][1].push(v[1] * carrier);
            }
        }
        Ok(Self {
            weights,
            polarized: spec.is_polarized(),
        })
    }

    pub fn detectors(&self) -> usize {
        self.weights.len()
    }

    /// `(E_H, E_V)` at every detector for one field sample.
    pub fn fields(&self, sample: &FieldSample, out: &mut [[Complex64; 2]]) {
        for (d, w) in self.weights.iter().enumerate() {
            let mut h = Complex64::new(0.0, 0.0);
            let mut v = Complex64::new(0.0, 0.0);
            if self.polarized {
                for ((a, wh), wv) in sample.alpha.iter().zip(&w[0]).zip(&w[1]) {
                    h += wh * a;
                    v += wv * a;
                }
            } else {
                for (a, wh) in sample.alpha.iter().zip(&w[0]) {
                    h += wh * a;
                }
            }
            out[d] = [h, v];
        }
    }
}

fn intensity(field: &[Complex64; 2], analyzer: &[f64; 2]) -> f64 {
    (field[0] * analyzer[0] + field[1] * analyzer[1]).norm_sqr()
}

/// Intensities `n_d = |theta_d . E_d(t_d)|^2` produced by one field sample.
pub fn detect(
    sample: &FieldSample,
    spec: &NetworkSpec,
    times: &[f64],
    profile: &SpectralProfile,
    grid: &ModeGrid,
    analyzers: &[f64],
) -> Result<Vec<f64>> {
    let weights = DetectionWeights::new(spec, times, profile, grid)?;
    let projections = spec.analyzer_weights(analyzers)?;
    let mut fields = vec![[Complex64::new(0.0, 0.0); 2]; weights.detectors()];
    weights.fields(sample, &mut fields);
    Ok(fields
        .iter()
        .zip(&projections)
        .map(|(f, p)| intensity(f, p))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorOptions {
    pub trials: u64,
    pub batches: u64,
    pub seed: u64,
    /// Rayon worker count; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Mode grid override; `None` picks the default for the network's delays.
    pub grid: Option<ModeGrid>,
}

impl EstimatorOptions {
    pub fn new(trials: u64, batches: u64, seed: u64) -> Self {
        Self {
            trials,
            batches,
            seed,
            workers: None,
            grid: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.batches < MIN_BATCHES {
            return Err(Error::Estimation(format!(
                "need at least {MIN_BATCHES} batches, got {}",
                self.batches
            )));
        }
        if self.trials < self.batches * MIN_TRIALS_PER_BATCH {
            return Err(Error::Estimation(format!(
                "{} trials is fewer than {MIN_TRIALS_PER_BATCH} per batch for {} batches",
                self.trials, self.batches
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Estimation("worker count must be positive".into()));
        }
        Ok(())
    }

    fn batch_size(&self, batch: u64) -> usize {
        let base = self.trials / self.batches;
        let extra = u64::from(batch < self.trials % self.batches);
        (base + extra) as usize
    }
}

/// Mean and standard error from equally weighted batch values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchStatistic {
    pub mean: f64,
    pub std_error: f64,
}

impl BatchStatistic {
    pub fn from_batches(values: &[f64]) -> Self {
        let b = values.len() as f64;
        let mean = values.iter().sum::<f64>() / b;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
        Self {
            mean,
            std_error: (var / b).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorOutput {
    /// Estimate of `<prod_d (n_d - <n_d>)>`.
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub batches: u64,
    /// Mean intensity at each detector with its standard error.
    pub mean_intensities: Vec<BatchStatistic>,
}

impl EstimatorOutput {
    /// `|estimate - reference| / std_error`
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.estimate - reference).abs() / self.std_error
    }
}

/// One network configuration observed under one or more analyzer settings.
#[derive(Clone, Debug)]
pub struct McSetup {
    pub spec: NetworkSpec,
    pub times: Vec<f64>,
    pub analyzer_sets: Vec<Vec<f64>>,
}

impl McSetup {
    pub fn new(spec: NetworkSpec, times: Vec<f64>, analyzer_sets: Vec<Vec<f64>>) -> Self {
        Self {
            spec,
            times,
            analyzer_sets,
        }
    }
}

struct PreparedSetup {
    weights: DetectionWeights,
    projections: Vec<Vec<[f64; 2]>>,
}

/// Batch-level values for one analyzer setting.
struct BatchResult {
    product: f64,
    means: Vec<f64>,
}

fn central_product(intensities: &[f64], n: usize) -> (f64, Vec<f64>) {
    let size = intensities.len() / n;
    let mut means = vec![0.0; n];
    for row in intensities.chunks_exact(n) {
        for (m, x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= size as f64;
    }
    let product = intensities
        .chunks_exact(n)
        .map(|row| row.iter().zip(&means).map(|(x, m)| x - m).product::<f64>())
        .sum::<f64>()
        / size as f64;
    (product, means)
}

fn run_batch(
    batch: u64,
    opts: &EstimatorOptions,
    scales: &[f64],
    setups: &[PreparedSetup],
) -> Vec<Vec<BatchResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(batch);
    let size = opts.batch_size(batch);
    let mut sample = FieldSample::zeros(scales.len());
    // intensities[setup][set] holds `size` rows of per-detector values
    let mut intensities: Vec<Vec<Vec<f64>>> = setups
        .iter()
        .map(|s| {
            let n = s.weights.detectors();
            vec![Vec::with_capacity(size * n); s.projections.len()]
        })
        .collect();
    let mut scratch: Vec<Vec<[Complex64; 2]>> = setups
        .iter()
        .map(|s| vec![[Complex64::new(0.0, 0.0); 2]; s.weights.detectors()])
        .collect();
    for _ in 0..size {
        fill_sample(scales, &mut rng, &mut sample.alpha);
        for ((setup, fields), store) in setups.iter().zip(&mut scratch).zip(&mut intensities) {
            setup.weights.fields(&sample, fields);
            for (proj, rows) in setup.projections.iter().zip(store.iter_mut()) {
                rows.extend(fields.iter().zip(proj).map(|(e, p)| intensity(e, p)));
            }
        }
    }
    setups
        .iter()
        .zip(&intensities)
        .map(|(setup, store)| {
            let n = setup.weights.detectors();
            store
                .iter()
                .map(|rows| {
                    let (product, means) = central_product(rows, n);
                    BatchResult { product, means }
                })
                .collect()
        })
        .collect()
}

fn largest_delay(spec: &NetworkSpec, times: &[f64]) -> Result<f64> {
    // Analyzer angles do not change the path delays.
    let analyzers = vec![0.0; if spec.is_polarized() { spec.detector_count() } else { 0 }];
    let responses = spec.detector_responses(&analyzers)?;
    let mut tau: f64 = 0.0;
    for (a, ra) in responses.iter().enumerate() {
        for (b, rb) in responses.iter().enumerate() {
            for da in ra.delays() {
                for db in rb.delays() {
                    tau = tau.max(((times[a] - da) - (times[b] - db)).abs());
                }
            }
        }
    }
    Ok(tau)
}

/// Estimates the fluctuation product for every setup and analyzer setting
/// from one shared stream of field samples.
///
/// Returns `out[setup][setting]`. Estimates from the same call are
/// statistically correlated with each other.
pub fn estimate_family(
    setups: &[McSetup],
    profile: &SpectralProfile,
    opts: &EstimatorOptions,
) -> Result<Vec<Vec<EstimatorOutput>>> {
    opts.validate()?;
    profile.validate()?;
    let mut tau_max: f64 = 0.0;
    for s in setups {
        s.spec.validate()?;
        if s.times.len() != s.spec.detector_count() {
            return Err(Error::Configuration(format!(
                "{} detection times for {} detectors",
                s.times.len(),
                s.spec.detector_count()
            )));
        }
        tau_max = tau_max.max(largest_delay(&s.spec, &s.times)?);
    }
    let grid = match &opts.grid {
        Some(g) => {
            g.check_resolution(profile, tau_max)?;
            g.clone()
        }
        None => ModeGrid::for_delays(profile, tau_max),
    };
    let prepared: Vec<PreparedSetup> = setups
        .iter()
        .map(|s| {
            Ok(PreparedSetup {
                weights: DetectionWeights::new(&s.spec, &s.times, profile, &grid)?,
                projections: s
                    .analyzer_sets
                    .iter()
                    .map(|a| s.spec.analyzer_weights(a))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    let scales = mode_scales(&grid, profile);

    let run = || -> Vec<Vec<Vec<BatchResult>>> {
        (0..opts.batches)
            .into_par_iter()
            .map(|b| run_batch(b, opts, &scales, &prepared))
            .collect()
    };
    let batches = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Estimation(e.to_string()))?
            .install(run),
        None => run(),
    };

    Ok(prepared
        .iter()
        .enumerate()
        .map(|(u, setup)| {
            let n = setup.weights.detectors();
            (0..setup.projections.len())
                .map(|s| {
                    let products: Vec<f64> = batches.iter().map(|b| b[u][s].product).collect();
                    let stat = BatchStatistic::from_batches(&products);
                    let mean_intensities = (0..n)
                        .map(|d| {
                            let means: Vec<f64> = batches.iter().map(|b| b[u][s].means[d]).collect();
                            BatchStatistic::from_batches(&means)
                        })
                        .collect();
                    EstimatorOutput {
                        estimate: stat.mean,
                        std_error: stat.std_error,
                        trials: opts.trials,
                        seed: opts.seed,
                        batches: opts.batches,
                        mean_intensities,
                    }
                })
                .collect()
        })
        .collect())
}

/// Estimates the fluctuation product for several analyzer settings of one
/// network, sharing the field samples.
pub fn estimate_correlators(
    spec: &NetworkSpec,
    times: &[f64],
    profile: &SpectralProfile,
    analyzer_sets: &[Vec<f64>],
    opts: &EstimatorOptions,
) -> Result<Vec<EstimatorOutput>> {
    let setup = McSetup::new(spec.clone(), times.to_vec(), analyzer_sets.to_vec());
    let mut out = estimate_family(&[setup], profile, opts)?;
    Ok(out.remove(0))
}

/// Estimates `<prod_d (n_d - <n_d>)>` for one analyzer setting.
pub fn estimate_correlator(
    spec: &NetworkSpec,
    times: &[f64],
    profile: &SpectralProfile,
    analyzers: &[f64],
    opts: &EstimatorOptions,
) -> Result<EstimatorOutput> {
    let mut out = estimate_correlators(spec, times, profile, &[analyzers.to_vec()], opts)?;
    Ok(out.remove(0))
}
