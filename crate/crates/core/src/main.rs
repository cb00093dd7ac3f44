use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use multipath_correlation::config::{Engine, ExperimentConfig, SweepSpec, Variant};
use multipath_correlation::experiment::{self, Table};
use multipath_correlation::Error;

#[derive(Parser)]
#[command(name = "multipath", version, about = "Thermal-light multipath correlation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fringe scan of the fluctuation correlator and G2.
    Sweep(Common),
    /// Normalized correlations over the computational basis.
    CnotTable(Common),
    /// Analyzer scan of the pi/4, 0 preparation.
    BellCurve(Common),
    /// N-detector fluctuation product of an N-channel network.
    NOrder(Common),
    /// Cross-check the engines; exits 1 if a check fails.
    Validate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    Regime,
    Quadrature,
    Mc,
    All,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Analytic => Engine::Analytic,
            EngineArg::Regime => Engine::Regime,
            EngineArg::Quadrature => Engine::Quadrature,
            EngineArg::Mc => Engine::MonteCarlo,
            EngineArg::All => Engine::All,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Configuration file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long)]
    trials: Option<u64>,
    /// Root seed; required whenever the Monte Carlo engine runs.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    batches: Option<u64>,
    /// Monte Carlo worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// name:start:stop:steps
    #[arg(long)]
    sweep: Option<String>,
}

impl Common {
    fn load(&self, polarized: bool) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(e) = self.engine {
            cfg.engine = e.into();
        }
        if let Some(t) = self.trials {
            cfg.mc.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.mc.seed = Some(s);
        }
        if let Some(b) = self.batches {
            cfg.mc.batches = Some(b);
        }
        if let Some(w) = self.workers {
            cfg.mc.workers = Some(w);
        }
        if let Some(o) = &self.out {
            cfg.output = Some(o.clone());
        }
        if let Some(s) = &self.sweep {
            cfg.sweep = Some(s.parse::<SweepSpec>()?);
        }
        if polarized && cfg.variant == Variant::Scalar {
            cfg.variant = Variant::Cnot;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, table: &Table) -> Result<(), Error> {
    let csv = table.to_csv();
    match &cfg.output {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(command: &Command) -> Result<u8, Error> {
    let (common, name) = match command {
        Command::Sweep(c) => (c, "sweep"),
        Command::CnotTable(c) => (c, "cnot-table"),
        Command::BellCurve(c) => (c, "bell-curve"),
        Command::NOrder(c) => (c, "n-order"),
        Command::Validate(c) => (c, "validate"),
    };
    let cfg = common.load(matches!(name, "cnot-table" | "bell-curve"))?;
    let table = match name {
        "sweep" => experiment::run_sweep(&cfg)?.table,
        "cnot-table" => experiment::run_cnot_table(&cfg)?.table,
        "bell-curve" => experiment::run_bell_curve(&cfg)?.table,
        "n-order" => experiment::run_n_order(&cfg)?.table,
        _ => {
            let report = experiment::validate(&cfg)?;
            emit(&cfg, &report.table)?;
            if !report.passed() {
                eprintln!("validation failed: {}", report.failures().join(", "));
                return Ok(1);
            }
            return Ok(0);
        }
    };
    emit(&cfg, &table)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::RegimeViolation(report) = &e {
                eprintln!("{report:?}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
