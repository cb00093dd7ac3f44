//! Experiment runners behind the command-line tool.
//!
//! Each runner turns an [`ExperimentConfig`] into a [`Table`] that renders
//! as CSV: a header row, one row per point, then `#` footer lines. Values
//! are written with Rust's shortest round-trip float formatting, so equal
//! inputs give byte-identical files.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::analytic::{
    derangement_sum, cycle_sum, g1_matrix, g1_quadrature_pair, p_cnot, regime_fringe,
    visibility_of, G2Parts, QuadratureGrid, EXTENSION_NOTE, POLARIZED_NORM,
};
use crate::config::{Engine, ExperimentConfig, SweepParam, SweepSpec, Variant};
use crate::error::{Error, Result};
use crate::model::{check_regime, relative_phase, wrap_phase, PolarizationSettings};
use crate::montecarlo::{estimate_family, EstimatorOptions, EstimatorOutput, McSetup};
use crate::network::NetworkSpec;

/// Largest relative phase accepted by the truth-table and Bell runs.
pub const PHASE_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        for line in &self.footer {
            let _ = writeln!(out, "# {line}");
        }
        out
    }

    /// Parsed numeric column; empty cells become `None`.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx].parse().ok()).collect())
    }
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e6)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn visibility_text(values: &[Option<f64>]) -> String {
    if values.is_empty() || values.iter().any(Option::is_none) {
        return "n/a".into();
    }
    match visibility_of(values.iter().flatten().copied()) {
        Ok(v) => format_number(v),
        Err(_) => "undefined".into(),
    }
}

fn quadrature_grid(cfg: &ExperimentConfig) -> QuadratureGrid {
    QuadratureGrid {
        spacing: cfg.quadrature_spacing,
        ..QuadratureGrid::default()
    }
}

/// Monte Carlo options, or an error when the config carries no seed.
pub fn mc_options(cfg: &ExperimentConfig) -> Result<EstimatorOptions> {
    let seed = cfg.mc.seed.ok_or_else(|| {
        Error::Configuration("Monte Carlo runs need an explicit seed (--seed or mc.seed)".into())
    })?;
    Ok(EstimatorOptions {
        workers: cfg.mc.workers,
        ..EstimatorOptions::new(cfg.mc.trials, cfg.mc.batch_count(), seed)
    })
}

fn run_info(cfg: &ExperimentConfig, engine: Engine) -> String {
    let mut s = format!("variant={} engine={}", cfg.variant.name(), engine.name());
    if engine.monte_carlo() {
        if let Some(seed) = cfg.mc.seed {
            let _ = write!(s, " seed={seed} trials={} batches={}", cfg.mc.trials, cfg.mc.batch_count());
        }
    }
    s
}

fn quadrature_matrix(
    spec: &NetworkSpec,
    times: &[f64],
    cfg: &ExperimentConfig,
    analyzers: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let n = spec.detector_count();
    let grid = quadrature_grid(cfg);
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| g1_quadrature_pair(spec, times, a, b, &cfg.spectrum, analyzers, &grid))
                .collect()
        })
        .collect()
}

fn two_detector(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.variant == Variant::NOrder {
        return Err(Error::Configuration(
            "this command needs the scalar or cnot network; use n-order for N-channel networks".into(),
        ));
    }
    Ok(())
}

/// One point of a fringe sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    /// Closed form, or the regime approximation when `engine = regime`.
    pub analytic: Option<f64>,
    pub quadrature: Option<f64>,
    pub mc: Option<EstimatorOutput>,
    pub g2: Option<f64>,
    pub regime_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRun {
    pub sweep: SweepSpec,
    pub points: Vec<SweepPoint>,
    pub table: Table,
}

pub fn default_sweep() -> SweepSpec {
    SweepSpec {
        param: SweepParam::Phase,
        start: 0.0,
        stop: 2.0 * PI,
        steps: 25,
    }
}

/// Fluctuation correlator (and `G2`) along a one-parameter sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepRun> {
    two_detector(cfg)?;
    let sweep = cfg.sweep.unwrap_or_else(default_sweep);
    sweep.validate()?;
    let engine = cfg.engine;
    let mc_opts = if engine.monte_carlo() { Some(mc_options(cfg)?) } else { None };

    let points_cfg: Vec<ExperimentConfig> = sweep
        .values()
        .into_iter()
        .map(|v| cfg.with_param(sweep.param, v))
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(points_cfg.len());
    let mut setups = Vec::new();
    for (p, c) in sweep.values().into_iter().zip(&points_cfg) {
        let spec = c.network()?;
        let times = c.times();
        let analyzers = c.analyzers();
        let report = check_regime(&c.geometry, &c.detection, &c.spectrum, &c.thresholds);
        let mut point = SweepPoint {
            param: p,
            analytic: None,
            quadrature: None,
            mc: None,
            g2: None,
            regime_ok: report.in_regime,
        };
        if engine.closed_form() {
            let g = g1_matrix(&spec, &times, &c.spectrum, &analyzers)?;
            let parts = G2Parts::from_g1(g[0][0], g[1][1], g[0][1]);
            point.analytic = Some(parts.interference);
            point.g2 = Some(parts.total());
        }
        if engine.regime() {
            let pol = (c.variant == Variant::Cnot).then_some(&c.polarization);
            point.analytic = match regime_fringe(&c.geometry, &c.detection, &c.spectrum, pol, &c.thresholds) {
                Ok(r) => Some(r.value),
                Err(Error::RegimeViolation(_)) => None,
                Err(e) => return Err(e),
            };
        }
        if engine.quadrature() {
            let g = quadrature_matrix(&spec, &times, c, &analyzers)?;
            let parts = G2Parts::from_g1(g[0][0], g[1][1], g[0][1]);
            point.quadrature = Some(parts.interference);
            point.g2 = point.g2.or(Some(parts.total()));
        }
        if mc_opts.is_some() {
            setups.push(McSetup::new(spec, times, vec![analyzers]));
        }
        points.push(point);
    }
    if let Some(opts) = &mc_opts {
        let family = estimate_family(&setups, &cfg.spectrum, opts)?;
        for (point, mut out) in points.iter_mut().zip(family) {
            let est = out.remove(0);
            if point.g2.is_none() {
                let m = &est.mean_intensities;
                point.g2 = Some(est.estimate + m[0].mean * m[1].mean);
            }
            point.mc = Some(est);
        }
    }

    let mut table = Table::new(&[
        "param", "analytic", "quadrature", "mc_estimate", "mc_stderr", "g2", "regime_ok",
    ]);
    for p in &points {
        table.rows.push(vec![
            format_number(p.param),
            cell(p.analytic),
            cell(p.quadrature),
            cell(p.mc.as_ref().map(|m| m.estimate)),
            cell(p.mc.as_ref().map(|m| m.std_error)),
            cell(p.g2),
            p.regime_ok.to_string(),
        ]);
    }
    let col = |f: &dyn Fn(&SweepPoint) -> Option<f64>| points.iter().map(f).collect::<Vec<_>>();
    table.footer.push(format!("sweep={sweep} {}", run_info(cfg, engine)));
    table.footer.push(format!(
        "visibility analytic={} quadrature={} mc={} g2={}",
        visibility_text(&col(&|p| p.analytic)),
        visibility_text(&col(&|p| p.quadrature)),
        visibility_text(&col(&|p| p.mc.as_ref().map(|m| m.estimate))),
        visibility_text(&col(&|p| p.g2)),
    ));
    let flagged = points.iter().filter(|p| !p.regime_ok).count();
    if flagged > 0 {
        table.footer.push(format!("{flagged} point(s) outside the multipath regime"));
    }
    Ok(SweepRun {
        sweep,
        points,
        table,
    })
}

fn check_phase(cfg: &ExperimentConfig) -> Result<()> {
    let phase = wrap_phase(relative_phase(&cfg.geometry, &cfg.spectrum));
    if phase.abs() > PHASE_TOLERANCE {
        return Err(Error::Configuration(format!(
            "relative phase {phase} exceeds {PHASE_TOLERANCE}; the gate table needs a balanced geometry"
        )));
    }
    Ok(())
}

/// One row of a normalized-correlation table.
#[derive(Clone, Debug, PartialEq)]
pub struct GateRow {
    pub polarization: PolarizationSettings,
    pub analytic: Option<f64>,
    pub quadrature: Option<f64>,
    /// Normalized estimate and standard error.
    pub mc: Option<(f64, f64)>,
    pub expected: f64,
    /// `|value - expected|` of the most accurate engine present.
    pub deviation: f64,
}

fn basis_label(angle: f64) -> &'static str {
    if angle.abs() < 1e-12 {
        "H"
    } else {
        "V"
    }
}

/// Normalized correlations for a list of polarization settings.
///
/// Values are divided by `scale`, the correlation of a unit-probability outcome.
fn gate_rows(
    cfg: &ExperimentConfig,
    settings: &[PolarizationSettings],
    scale: f64,
    expected: impl Fn(&PolarizationSettings) -> f64,
) -> Result<Vec<GateRow>> {
    let engine = cfg.engine;
    let times = cfg.times();
    let mut rows = Vec::with_capacity(settings.len());
    // Settings sharing a preparation share one Monte Carlo setup.
    let mut setups: Vec<McSetup> = Vec::new();
    let mut index: Vec<(usize, usize)> = Vec::new();
    for pol in settings {
        let spec = NetworkSpec::cnot(cfg.geometry, pol.phi_c, pol.phi_t);
        let analyzers = vec![pol.theta_c, pol.theta_t];
        let analytic = if engine.closed_form() {
            Some(g1_matrix(&spec, &times, &cfg.spectrum, &analyzers)?[0][1].norm_sqr() / scale)
        } else if engine.regime() {
            let r = regime_fringe(&cfg.geometry, &cfg.detection, &cfg.spectrum, Some(pol), &cfg.thresholds)?;
            Some(r.value / scale)
        } else {
            None
        };
        let quadrature = if engine.quadrature() {
            let g = g1_quadrature_pair(&spec, &times, 0, 1, &cfg.spectrum, &analyzers, &quadrature_grid(cfg))?;
            Some(g.norm_sqr() / scale)
        } else {
            None
        };
        if engine.monte_carlo() {
            let u = match setups.iter().position(|s| s.spec == spec) {
                Some(u) => u,
                None => {
                    setups.push(McSetup::new(spec, times.clone(), Vec::new()));
                    setups.len() - 1
                }
            };
            setups[u].analyzer_sets.push(analyzers);
            index.push((u, setups[u].analyzer_sets.len() - 1));
        }
        rows.push(GateRow {
            polarization: *pol,
            analytic,
            quadrature,
            mc: None,
            expected: expected(pol),
            deviation: 0.0,
        });
    }
    if engine.monte_carlo() {
        let family = estimate_family(&setups, &cfg.spectrum, &mc_options(cfg)?)?;
        for (row, &(u, s)) in rows.iter_mut().zip(&index) {
            let out = &family[u][s];
            row.mc = Some((out.estimate / scale, out.std_error / scale));
        }
    }
    for row in &mut rows {
        let best = row.analytic.or(row.quadrature).or(row.mc.map(|m| m.0));
        row.deviation = best.map(|v| (v - row.expected).abs()).unwrap_or(f64::NAN);
    }
    Ok(rows)
}

fn polarized_scale(cfg: &ExperimentConfig) -> f64 {
    cfg.spectrum.mean_rate * cfg.spectrum.mean_rate * POLARIZED_NORM
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateTable {
    pub rows: Vec<GateRow>,
    pub table: Table,
}

/// Normalized correlations over every computational-basis preparation and
/// analyzer pair, against the controlled-NOT truth table.
pub fn run_cnot_table(cfg: &ExperimentConfig) -> Result<GateTable> {
    two_detector(cfg)?;
    check_phase(cfg)?;
    let basis = [0.0, PI / 2.0];
    let mut settings = Vec::new();
    for &pc in &basis {
        for &pt in &basis {
            for &tc in &basis {
                for &tt in &basis {
                    settings.push(PolarizationSettings::new(pc, pt, tc, tt));
                }
            }
        }
    }
    let rows = gate_rows(cfg, &settings, polarized_scale(cfg), |p| p_cnot(p).round())?;
    let mut table = Table::new(&[
        "control_in", "target_in", "control_out", "target_out", "analytic", "quadrature",
        "mc_estimate", "mc_stderr", "expected", "deviation",
    ]);
    for r in &rows {
        let p = &r.polarization;
        table.rows.push(vec![
            basis_label(p.phi_c).into(),
            basis_label(p.phi_t).into(),
            basis_label(p.theta_c).into(),
            basis_label(p.theta_t).into(),
            cell(r.analytic),
            cell(r.quadrature),
            cell(r.mc.map(|m| m.0)),
            cell(r.mc.map(|m| m.1)),
            format_number(r.expected),
            format_number(r.deviation),
        ]);
    }
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    table.footer.push(run_info(cfg, cfg.engine));
    table.footer.push(format!("max deviation from truth table={}", format_number(worst)));
    Ok(GateTable { rows, table })
}

pub fn default_bell_sweep() -> SweepSpec {
    SweepSpec {
        param: SweepParam::ThetaC,
        start: 0.0,
        stop: PI,
        steps: 37,
    }
}

/// Analyzer scan of the `pi/4, 0` preparation, normalized to its value at
/// `theta_C = theta_T = 0`; the expected curve is `cos^2(theta_C - theta_T)`.
pub fn run_bell_curve(cfg: &ExperimentConfig) -> Result<GateTable> {
    two_detector(cfg)?;
    check_phase(cfg)?;
    let sweep = cfg.sweep.unwrap_or_else(default_bell_sweep);
    if !matches!(sweep.param, SweepParam::ThetaC | SweepParam::ThetaT) {
        return Err(Error::Configuration(format!(
            "bell-curve sweeps an analyzer angle, not '{}'",
            sweep.param.name()
        )));
    }
    let base = PolarizationSettings {
        phi_c: FRAC_PI_4,
        phi_t: 0.0,
        ..cfg.polarization
    };
    let settings: Vec<PolarizationSettings> = sweep
        .values()
        .into_iter()
        .map(|v| match sweep.param {
            SweepParam::ThetaC => base.with_analyzers(v, base.theta_t),
            _ => base.with_analyzers(base.theta_c, v),
        })
        .collect();
    // p_cnot at theta_C = theta_T = 0 is cos^2(pi/4) = 1/2.
    let scale = polarized_scale(cfg) * 0.5;
    let rows = gate_rows(cfg, &settings, scale, |p| (p.theta_c - p.theta_t).cos().powi(2))?;
    let mut table = Table::new(&[
        "theta_c", "theta_t", "analytic", "quadrature", "mc_estimate", "mc_stderr", "expected",
        "deviation",
    ]);
    for r in &rows {
        let p = &r.polarization;
        table.rows.push(vec![
            format_number(p.theta_c),
            format_number(p.theta_t),
            cell(r.analytic),
            cell(r.quadrature),
            cell(r.mc.map(|m| m.0)),
            cell(r.mc.map(|m| m.1)),
            format_number(r.expected),
            format_number(r.deviation),
        ]);
    }
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    table.footer.push(format!("sweep={sweep} {}", run_info(cfg, cfg.engine)));
    table.footer.push(format!("max deviation from cos^2={}", format_number(worst)));
    Ok(GateTable { rows, table })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NOrderRun {
    pub detectors: usize,
    /// `<prod dn>` from the closed-form `G1` matrix.
    pub analytic: Option<f64>,
    /// Single-cycle sum (joint cumulant) from the closed-form matrix.
    pub cycle_sum: Option<f64>,
    pub quadrature: Option<f64>,
    pub mc: Option<EstimatorOutput>,
    pub table: Table,
}

/// N-detector fluctuation product of an N-channel network.
pub fn run_n_order(cfg: &ExperimentConfig) -> Result<NOrderRun> {
    if cfg.variant != Variant::NOrder {
        return Err(Error::Configuration("n-order needs network.variant = n_order".into()));
    }
    let spec = cfg.network()?;
    let times = cfg.times();
    let analyzers = cfg.analyzers();
    let engine = cfg.engine;
    let (mut analytic, mut cycle, mut quadrature, mut mc) = (None, None, None, None);
    if engine.closed_form() || engine.regime() {
        let g = g1_matrix(&spec, &times, &cfg.spectrum, &analyzers)?;
        analytic = Some(derangement_sum(&g)?);
        cycle = Some(cycle_sum(&g)?);
    }
    if engine.quadrature() {
        quadrature = Some(derangement_sum(&quadrature_matrix(&spec, &times, cfg, &analyzers)?)?);
    }
    if engine.monte_carlo() {
        let setup = McSetup::new(spec.clone(), times, vec![analyzers]);
        mc = Some(estimate_family(&[setup], &cfg.spectrum, &mc_options(cfg)?)?.remove(0).remove(0));
    }
    let detectors = spec.detector_count();
    let mut table = Table::new(&[
        "detectors", "analytic", "cycle_sum", "quadrature", "mc_estimate", "mc_stderr",
    ]);
    table.rows.push(vec![
        detectors.to_string(),
        cell(analytic),
        cell(cycle),
        cell(quadrature),
        cell(mc.as_ref().map(|m| m.estimate)),
        cell(mc.as_ref().map(|m| m.std_error)),
    ]);
    table.footer.push(run_info(cfg, engine));
    if detectors > 2 {
        table.footer.push(EXTENSION_NOTE.into());
    }
    Ok(NOrderRun {
        detectors,
        analytic,
        cycle_sum: cycle,
        quadrature,
        mc,
        table,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Statistical check outside its band at a sample size too small to decide.
    Indeterminate,
    Skipped,
}

impl CheckStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Indeterminate => "indeterminate",
            CheckStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub table: Table,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Trial count below which statistical checks use the wide band.
pub const SMALL_SAMPLE: u64 = 10_000;

fn deterministic(name: &str, tolerance: f64, observed: f64) -> Check {
    Check {
        name: name.into(),
        tolerance,
        observed,
        status: if observed < tolerance { CheckStatus::Pass } else { CheckStatus::Fail },
    }
}

fn statistical(name: &str, tolerance: f64, observed: f64, small: bool) -> Check {
    let status = match (observed < tolerance, small) {
        (true, _) => CheckStatus::Pass,
        (false, true) => CheckStatus::Indeterminate,
        (false, false) => CheckStatus::Fail,
    };
    Check {
        name: name.into(),
        tolerance,
        observed,
        status,
    }
}

fn skipped(name: &str, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        tolerance,
        observed: f64::NAN,
        status: CheckStatus::Skipped,
    }
}

/// Cross-checks the engines on the configured network.
pub fn validate(cfg: &ExperimentConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let spec = cfg.network()?;
    let times = cfg.times();
    let analyzers = cfg.analyzers();
    let rate = cfg.spectrum.mean_rate;
    let n = spec.detector_count();
    let mut checks = Vec::new();

    let closed = g1_matrix(&spec, &times, &cfg.spectrum, &analyzers)?;
    let quad = quadrature_matrix(&spec, &times, cfg, &analyzers)?;
    let oracle = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (closed[i][j] - quad[i][j]).norm() / rate)
        .fold(0.0, f64::max);
    checks.push(deterministic("closed_vs_quadrature_g1", 1e-6, oracle));

    let moment = derangement_sum(&closed)?;
    let r2 = rate * rate;
    if n == 2 {
        let abs2 = closed[0][1].norm_sqr();
        checks.push(deterministic("cycle_sum_equals_abs_g1_squared", 1e-12, (cycle_sum(&closed)? - abs2).abs() / r2));
        let g2c = G2Parts::from_g1(closed[0][0], closed[1][1], closed[0][1]).total();
        let g2q = G2Parts::from_g1(quad[0][0], quad[1][1], quad[0][1]).total();
        checks.push(deterministic("closed_vs_quadrature_g2", 1e-6, (g2c - g2q).abs() / r2));

        let report = check_regime(&cfg.geometry, &cfg.detection, &cfg.spectrum, &cfg.thresholds);
        let pol = (cfg.variant == Variant::Cnot).then_some(&cfg.polarization);
        if report.in_regime {
            let approx = regime_fringe(&cfg.geometry, &cfg.detection, &cfg.spectrum, pol, &cfg.thresholds)?.value;
            let scale = match pol {
                Some(_) => r2 * POLARIZED_NORM,
                None => r2,
            };
            checks.push(deterministic("regime_vs_closed", 1e-3, (approx - abs2).abs() / scale));
        } else {
            checks.push(skipped("regime_vs_closed", 1e-3));
        }
        if cfg.variant == Variant::Cnot {
            if check_phase(cfg).is_ok() {
                let table = run_cnot_table(&ExperimentConfig {
                    engine: Engine::Analytic,
                    ..cfg.clone()
                })?;
                let worst = table.rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
                checks.push(deterministic("cnot_truth_table", 1e-9, worst));
            } else {
                checks.push(skipped("cnot_truth_table", 1e-9));
            }
        }
    }

    if cfg.engine.monte_carlo() {
        let opts = mc_options(cfg)?;
        let small = opts.trials < SMALL_SAMPLE;
        let band = if small { 5.0 } else { 3.0 };
        let setup = McSetup::new(spec.clone(), times.clone(), vec![analyzers.clone()]);
        let out = estimate_family(&[setup], &cfg.spectrum, &opts)?.remove(0).remove(0);
        checks.push(statistical("mc_fluctuation_product_zscore", band, out.z_score(moment), small));
        for (d, m) in out.mean_intensities.iter().enumerate() {
            let z = z_of(m.mean, closed[d][d].re, m.std_error);
            checks.push(statistical(&format!("mc_mean_intensity_{d}_zscore"), band, z, small));
        }
    }

    let mut table = Table::new(&["check", "tolerance", "observed", "status"]);
    for c in &checks {
        table.rows.push(vec![
            c.name.clone(),
            format_number(c.tolerance),
            format_number(c.observed),
            c.status.name().into(),
        ]);
    }
    table.footer.push(run_info(cfg, cfg.engine));
    let report = ValidationReport { checks, table };
    let verdict = if report.passed() { "pass".to_string() } else { format!("fail: {}", report.failures().join(", ")) };
    let mut report = report;
    report.table.footer.push(format!("result={verdict}"));
    Ok(report)
}

fn z_of(value: f64, reference: f64, std_error: f64) -> f64 {
    let diff = (value - reference).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / std_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SweepSpec;

    #[test]
    fn scalar_sweep_columns() {
        let cfg = ExperimentConfig::default();
        let run = run_sweep(&cfg).unwrap();
        assert_eq!(run.points.len(), 25);
        for p in &run.points {
            let expected = 0.5 * (1.0 + p.param.cos());
            assert!((p.analytic.unwrap() - expected).abs() < 1e-3 * 1.0);
            assert!(p.regime_ok);
            assert!(p.quadrature.is_none() && p.mc.is_none());
        }
        let csv = run.table.to_csv();
        assert!(csv.starts_with("param,analytic,quadrature,mc_estimate,mc_stderr,g2,regime_ok\n"));
        let vis: f64 = csv
            .split("visibility analytic=")
            .nth(1)
            .and_then(|t| t.split_whitespace().next())
            .and_then(|v| v.parse().ok())
            .unwrap();
        assert!((vis - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mc_without_seed_is_refused() {
        let cfg = ExperimentConfig {
            engine: Engine::MonteCarlo,
            ..ExperimentConfig::default()
        };
        assert!(matches!(run_sweep(&cfg), Err(Error::Configuration(_))));
    }

    #[test]
    fn regime_engine_flags_out_of_regime_rows() {
        let cfg = ExperimentConfig {
            engine: Engine::Regime,
            sweep: Some(SweepSpec::new(SweepParam::TC, 0.0, 10.0, 3).unwrap()),
            ..ExperimentConfig::default()
        };
        let run = run_sweep(&cfg).unwrap();
        assert!(run.points[0].regime_ok && run.points[0].analytic.is_some());
        assert!(!run.points[2].regime_ok && run.points[2].analytic.is_none());
        assert!(run.table.to_csv().contains("2 point(s) outside"));
    }

    #[test]
    fn cnot_table_matches_truth_table() {
        let cfg = ExperimentConfig {
            variant: Variant::Cnot,
            ..ExperimentConfig::default()
        };
        let t = run_cnot_table(&cfg).unwrap();
        assert_eq!(t.rows.len(), 16);
        assert_eq!(t.rows.iter().filter(|r| r.expected == 1.0).count(), 4);
        assert!(t.rows.iter().all(|r| r.deviation < 1e-9));
    }

    #[test]
    fn cnot_table_needs_small_phase() {
        let cfg = ExperimentConfig::default().with_param(SweepParam::Phase, 0.5).unwrap();
        assert!(matches!(run_cnot_table(&cfg), Err(Error::Configuration(_))));
    }

    #[test]
    fn bell_curve_follows_cos_squared() {
        let t = run_bell_curve(&ExperimentConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 37);
        assert!(t.rows.iter().all(|r| r.deviation < 1e-9));
    }

    #[test]
    fn validate_default_passes() {
        let r = validate(&ExperimentConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn validate_coarse_grid_is_a_configuration_error() {
        let cfg = ExperimentConfig {
            quadrature_spacing: Some(0.5),
            ..ExperimentConfig::default()
        };
        assert!(matches!(validate(&cfg), Err(Error::Resolution { .. })));
    }
}
