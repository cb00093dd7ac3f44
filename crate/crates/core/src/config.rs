//! Experiment configuration files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    = blank | comment | entry
//! comment = "#" any-text
//! entry   = key "=" value
//! key     = section "." name | name        (e.g. geometry.l_c, engine)
//! number  = float | [float "*"] "pi" ["/" float]
//! ```
//!
//! Whitespace around keys and values is ignored; a key may appear once.
//! List values (`n_order.*`) are comma separated. Stages are written
//! `control:LONG:SHORT` or `target:LONG:SHORT`. A sweep is
//! `name:start:stop:steps` with both end points included.
//!
//! | key | default |
//! |-----|---------|
//! | `network.variant` | `scalar` (`scalar`, `cnot`, `n_order`) |
//! | `geometry.l_c`, `geometry.s_c`, `geometry.l_t`, `geometry.s_t` | `100`, `0`, `100`, `0` |
//! | `geometry.c` | `1` |
//! | `spectrum.omega0`, `spectrum.delta_omega`, `spectrum.mean_rate` | `1000`, `1`, `1` |
//! | `detection.t_c`, `detection.t_t` | `0`, `0` |
//! | `polarization.phi_c`, `.phi_t`, `.theta_c`, `.theta_t` | `0` |
//! | `n_order.rotations`, `.stages`, `.analyzers`, `.times` | required for `n_order` |
//! | `regime.small`, `regime.large` | `0.02`, `50` |
//! | `engine` | `analytic` (`analytic`, `regime`, `quadrature`, `mc`, `all`) |
//! | `sweep` | command default |
//! | `quadrature.spacing` | automatic |
//! | `mc.trials`, `mc.batches` | `100000`, `20` (fewer when trials < 2000) |
//! | `mc.seed`, `mc.workers` | unset |
//! | `output` | standard output |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    relative_phase, wrap_phase, DetectionSettings, PathGeometry, PolarizationSettings,
    RegimeThresholds, SpectralProfile,
};
use crate::montecarlo::{MIN_BATCHES, MIN_TRIALS_PER_BATCH};
use crate::network::{NetworkSpec, PTypeStage, StageKind};

fn config_error(msg: impl Into<String>) -> Error {
    Error::Configuration(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Scalar,
    Cnot,
    NOrder,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Scalar => "scalar",
            Variant::Cnot => "cnot",
            Variant::NOrder => "n_order",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Variant::Scalar),
            "cnot" => Ok(Variant::Cnot),
            "n_order" => Ok(Variant::NOrder),
            _ => Err(config_error(format!("unknown network variant '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Exact closed form.
    Analytic,
    /// Regime approximation (only the correlated path pairs).
    Regime,
    Quadrature,
    MonteCarlo,
    All,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Regime => "regime",
            Engine::Quadrature => "quadrature",
            Engine::MonteCarlo => "mc",
            Engine::All => "all",
        }
    }

    pub fn closed_form(&self) -> bool {
        matches!(self, Engine::Analytic | Engine::All)
    }

    pub fn regime(&self) -> bool {
        matches!(self, Engine::Regime)
    }

    pub fn quadrature(&self) -> bool {
        matches!(self, Engine::Quadrature | Engine::All)
    }

    pub fn monte_carlo(&self) -> bool {
        matches!(self, Engine::MonteCarlo | Engine::All)
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "regime" => Ok(Engine::Regime),
            "quadrature" => Ok(Engine::Quadrature),
            "mc" | "montecarlo" => Ok(Engine::MonteCarlo),
            "all" => Ok(Engine::All),
            _ => Err(config_error(format!("unknown engine '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// Relative phase, realized by adjusting `l_c`.
    Phase,
    ThetaC,
    ThetaT,
    PhiC,
    PhiT,
    TC,
    TT,
    LC,
    SC,
    LT,
    ST,
}

const SWEEP_NAMES: [(&str, SweepParam); 11] = [
    ("phase", SweepParam::Phase),
    ("theta_c", SweepParam::ThetaC),
    ("theta_t", SweepParam::ThetaT),
    ("phi_c", SweepParam::PhiC),
    ("phi_t", SweepParam::PhiT),
    ("t_c", SweepParam::TC),
    ("t_t", SweepParam::TT),
    ("l_c", SweepParam::LC),
    ("s_c", SweepParam::SC),
    ("l_t", SweepParam::LT),
    ("s_t", SweepParam::ST),
];

impl SweepParam {
    pub fn name(&self) -> &'static str {
        SWEEP_NAMES.iter().find(|(_, p)| p == self).map(|(n, _)| *n).unwrap_or("?")
    }

    pub fn is_polarization(&self) -> bool {
        matches!(
            self,
            SweepParam::ThetaC | SweepParam::ThetaT | SweepParam::PhiC | SweepParam::PhiT
        )
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SWEEP_NAMES
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, p)| *p)
            .ok_or_else(|| {
                let known: Vec<&str> = SWEEP_NAMES.iter().map(|(n, _)| *n).collect();
                config_error(format!(
                    "unknown sweep parameter '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, start: f64, stop: f64, steps: usize) -> Result<Self> {
        let sweep = Self {
            param,
            start,
            stop,
            steps,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(config_error(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(config_error("sweep bounds must be finite"));
        }
        Ok(())
    }

    /// Evenly spaced values, both end points included.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.start + k as f64 * step).collect()
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [name, start, stop, steps] = parts[..] else {
            return Err(config_error(format!(
                "sweep must look like name:start:stop:steps, got '{s}'"
            )));
        };
        let steps = steps
            .parse::<usize>()
            .map_err(|_| config_error(format!("sweep steps '{steps}' is not a count")))?;
        Self::new(name.parse()?, parse_number(start)?, parse_number(stop)?, steps)
    }
}

impl std::fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}:{}", self.param.name(), self.start, self.stop, self.steps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NOrderSettings {
    pub rotations: Vec<f64>,
    pub stages: Vec<PTypeStage>,
    pub analyzers: Vec<f64>,
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    /// Unset means [`McSettings::batch_count`] picks one.
    pub batches: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl McSettings {
    pub const DEFAULT_BATCHES: u64 = 20;

    /// Explicit count, else 20 shrunk so small runs keep full batches.
    pub fn batch_count(&self) -> u64 {
        self.batches.unwrap_or_else(|| {
            (self.trials / MIN_TRIALS_PER_BATCH).clamp(MIN_BATCHES, Self::DEFAULT_BATCHES)
        })
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 100_000,
            batches: None,
            seed: None,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub geometry: PathGeometry,
    pub spectrum: SpectralProfile,
    pub detection: DetectionSettings,
    pub polarization: PolarizationSettings,
    pub n_order: Option<NOrderSettings>,
    pub thresholds: RegimeThresholds,
    pub engine: Engine,
    pub sweep: Option<SweepSpec>,
    pub quadrature_spacing: Option<f64>,
    pub mc: McSettings,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Scalar,
            geometry: PathGeometry::balanced(100.0, 0.0),
            spectrum: SpectralProfile {
                omega0: 1000.0,
                delta_omega: 1.0,
                mean_rate: 1.0,
            },
            detection: DetectionSettings::default(),
            polarization: PolarizationSettings::default(),
            n_order: None,
            thresholds: RegimeThresholds::default(),
            engine: Engine::Analytic,
            sweep: None,
            quadrature_spacing: None,
            mc: McSettings::default(),
            output: None,
        }
    }
}

/// Parses a float, `pi`, `k*pi`, `pi/m` or `k*pi/m`.
pub fn parse_number(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || config_error(format!("'{text}' is not a number"));
    if let Some(idx) = t.find("pi") {
        let (head, tail) = (&t[..idx], &t[idx + 2..]);
        let coef = match head.trim() {
            "" => 1.0,
            "-" => -1.0,
            h => h
                .strip_suffix('*')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        let den = match tail.trim() {
            "" => 1.0,
            d => d
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        return Ok(coef * PI / den);
    }
    let v = t.parse::<f64>().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_number).collect()
}

fn parse_stage(text: &str) -> Result<PTypeStage> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [kind, long, short] = parts[..] else {
        return Err(config_error(format!("stage must look like kind:long:short, got '{text}'")));
    };
    let (long, short) = (parse_number(long)?, parse_number(short)?);
    match kind {
        "control" => Ok(PTypeStage::control(long, short)),
        "target" => Ok(PTypeStage::target(long, short)),
        _ => Err(config_error(format!("unknown stage kind '{kind}'"))),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn stage_text(stage: &PTypeStage) -> String {
    let kind = match stage.kind {
        StageKind::Control => "control",
        StageKind::Target => "target",
    };
    format!("{kind}:{}:{}", stage.long, stage.short)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim().to_string();
            if entries.contains_key(&key) {
                return Err(config_error(format!("line {}: duplicate key '{key}'", i + 1)));
            }
            entries.insert(key, (i + 1, value.trim().to_string()));
        }

        let mut cfg = Self::default();
        let mut rotations = None;
        let mut stages = None;
        let mut analyzers = None;
        let mut times = None;
        for (key, (line, value)) in &entries {
            let at = |e: Error| match e {
                Error::Configuration(m) => config_error(format!("line {line} ({key}): {m}")),
                other => other,
            };
            let num = || parse_number(value).map_err(at);
            let count = || {
                value
                    .parse::<u64>()
                    .map_err(|_| config_error(format!("line {line} ({key}): '{value}' is not a count")))
            };
            match key.as_str() {
                "network.variant" => cfg.variant = value.parse().map_err(at)?,
                "geometry.l_c" => cfg.geometry.l_c = num()?,
                "geometry.s_c" => cfg.geometry.s_c = num()?,
                "geometry.l_t" => cfg.geometry.l_t = num()?,
                "geometry.s_t" => cfg.geometry.s_t = num()?,
                "geometry.c" => cfg.geometry.c = num()?,
                "spectrum.omega0" => cfg.spectrum.omega0 = num()?,
                "spectrum.delta_omega" => cfg.spectrum.delta_omega = num()?,
                "spectrum.mean_rate" => cfg.spectrum.mean_rate = num()?,
                "detection.t_c" => cfg.detection.t_c = num()?,
                "detection.t_t" => cfg.detection.t_t = num()?,
                "polarization.phi_c" => cfg.polarization.phi_c = num()?,
                "polarization.phi_t" => cfg.polarization.phi_t = num()?,
                "polarization.theta_c" => cfg.polarization.theta_c = num()?,
                "polarization.theta_t" => cfg.polarization.theta_t = num()?,
                "n_order.rotations" => rotations = Some(parse_list(value).map_err(at)?),
                "n_order.analyzers" => analyzers = Some(parse_list(value).map_err(at)?),
                "n_order.times" => times = Some(parse_list(value).map_err(at)?),
                "n_order.stages" => {
                    stages = Some(value.split(',').map(parse_stage).collect::<Result<Vec<_>>>().map_err(at)?)
                }
                "regime.small" => cfg.thresholds.small = num()?,
                "regime.large" => cfg.thresholds.large = num()?,
                "engine" => cfg.engine = value.parse().map_err(at)?,
                "sweep" => cfg.sweep = Some(value.parse().map_err(at)?),
                "quadrature.spacing" => cfg.quadrature_spacing = Some(num()?),
                "mc.trials" => cfg.mc.trials = count()?,
                "mc.batches" => cfg.mc.batches = Some(count()?),
                "mc.seed" => cfg.mc.seed = Some(count()?),
                "mc.workers" => cfg.mc.workers = Some(count()? as usize),
                "output" => cfg.output = Some(PathBuf::from(value)),
                _ => return Err(config_error(format!("line {line}: unknown key '{key}'"))),
            }
        }

        let any_n_order = rotations.is_some() || stages.is_some() || analyzers.is_some() || times.is_some();
        if cfg.variant == Variant::NOrder {
            let missing = |name: &str| config_error(format!("n_order variant needs n_order.{name}"));
            cfg.n_order = Some(NOrderSettings {
                rotations: rotations.ok_or_else(|| missing("rotations"))?,
                stages: stages.ok_or_else(|| missing("stages"))?,
                analyzers: analyzers.ok_or_else(|| missing("analyzers"))?,
                times: times.ok_or_else(|| missing("times"))?,
            });
        } else if any_n_order {
            return Err(config_error("n_order.* keys require network.variant = n_order"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Canonical text form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("network.variant", self.variant.name().into());
        put("geometry.l_c", self.geometry.l_c.to_string());
        put("geometry.s_c", self.geometry.s_c.to_string());
        put("geometry.l_t", self.geometry.l_t.to_string());
        put("geometry.s_t", self.geometry.s_t.to_string());
        put("geometry.c", self.geometry.c.to_string());
        put("spectrum.omega0", self.spectrum.omega0.to_string());
        put("spectrum.delta_omega", self.spectrum.delta_omega.to_string());
        put("spectrum.mean_rate", self.spectrum.mean_rate.to_string());
        put("detection.t_c", self.detection.t_c.to_string());
        put("detection.t_t", self.detection.t_t.to_string());
        put("polarization.phi_c", self.polarization.phi_c.to_string());
        put("polarization.phi_t", self.polarization.phi_t.to_string());
        put("polarization.theta_c", self.polarization.theta_c.to_string());
        put("polarization.theta_t", self.polarization.theta_t.to_string());
        if let Some(n) = &self.n_order {
            put("n_order.rotations", join(&n.rotations));
            put(
                "n_order.stages",
                n.stages.iter().map(stage_text).collect::<Vec<_>>().join(", "),
            );
            put("n_order.analyzers", join(&n.analyzers));
            put("n_order.times", join(&n.times));
        }
        put("regime.small", self.thresholds.small.to_string());
        put("regime.large", self.thresholds.large.to_string());
        put("engine", self.engine.name().into());
        if let Some(s) = &self.sweep {
            put("sweep", s.to_string());
        }
        if let Some(h) = self.quadrature_spacing {
            put("quadrature.spacing", h.to_string());
        }
        put("mc.trials", self.mc.trials.to_string());
        if let Some(b) = self.mc.batches {
            put("mc.batches", b.to_string());
        }
        if let Some(s) = self.mc.seed {
            put("mc.seed", s.to_string());
        }
        if let Some(w) = self.mc.workers {
            put("mc.workers", w.to_string());
        }
        if let Some(p) = &self.output {
            put("output", p.display().to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.spectrum.validate()?;
        self.geometry.validate()?;
        RegimeThresholds::new(self.thresholds.small, self.thresholds.large)?;
        if let Some(s) = &self.sweep {
            s.validate()?;
            if self.variant == Variant::Scalar && s.param.is_polarization() {
                return Err(config_error(format!(
                    "sweep parameter '{}' needs a polarized network",
                    s.param.name()
                )));
            }
            if self.variant == Variant::NOrder {
                return Err(config_error("n_order networks do not take a sweep"));
            }
        }
        if let Some(h) = self.quadrature_spacing {
            if !(h > 0.0) {
                return Err(config_error(format!("quadrature.spacing must be positive, got {h}")));
            }
        }
        if self.mc.workers == Some(0) {
            return Err(config_error("mc.workers must be positive"));
        }
        if let Some(n) = &self.n_order {
            let count = n.rotations.len();
            if n.analyzers.len() != count || n.times.len() != count {
                return Err(config_error(format!(
                    "n_order lists disagree: {} rotations, {} stages, {} analyzers, {} times",
                    count,
                    n.stages.len(),
                    n.analyzers.len(),
                    n.times.len()
                )));
            }
        }
        self.network()?;
        Ok(())
    }

    pub fn network(&self) -> Result<NetworkSpec> {
        Ok(match self.variant {
            Variant::Scalar => NetworkSpec::two_path_scalar(self.geometry),
            Variant::Cnot => {
                NetworkSpec::cnot(self.geometry, self.polarization.phi_c, self.polarization.phi_t)
            }
            Variant::NOrder => {
                let n = self
                    .n_order
                    .as_ref()
                    .ok_or_else(|| config_error("n_order variant needs n_order settings"))?;
                NetworkSpec::n_order(&n.rotations, &n.stages, self.geometry.c)?
            }
        })
    }

    /// Detection times, one per detector.
    pub fn times(&self) -> Vec<f64> {
        match &self.n_order {
            Some(n) if self.variant == Variant::NOrder => n.times.clone(),
            _ => vec![self.detection.t_c, self.detection.t_t],
        }
    }

    /// Analyzer angles, one per detector (empty for the scalar network).
    pub fn analyzers(&self) -> Vec<f64> {
        match self.variant {
            Variant::Scalar => Vec::new(),
            Variant::Cnot => vec![self.polarization.theta_c, self.polarization.theta_t],
            Variant::NOrder => self.n_order.as_ref().map(|n| n.analyzers.clone()).unwrap_or_default(),
        }
    }

    /// Copy of the config with one sweep parameter set to `value`.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        let g = &mut cfg.geometry;
        match param {
            SweepParam::Phase => {
                let base = wrap_phase(relative_phase(&self.geometry, &self.spectrum));
                if self.spectrum.omega0 == 0.0 {
                    return Err(config_error("a phase sweep needs a nonzero carrier frequency"));
                }
                g.l_c += (value - base) * g.c / self.spectrum.omega0;
            }
            SweepParam::ThetaC => cfg.polarization.theta_c = value,
            SweepParam::ThetaT => cfg.polarization.theta_t = value,
            SweepParam::PhiC => cfg.polarization.phi_c = value,
            SweepParam::PhiT => cfg.polarization.phi_t = value,
            SweepParam::TC => cfg.detection.t_c = value,
            SweepParam::TT => cfg.detection.t_t = value,
            SweepParam::LC => g.l_c = value,
            SweepParam::SC => g.s_c = value,
            SweepParam::LT => g.l_t = value,
            SweepParam::ST => g.s_t = value,
        }
        cfg.geometry.validate()?;
        Ok(cfg)
    }
}
