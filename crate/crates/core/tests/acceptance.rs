//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Every tolerance below is the target value; a failing criterion is
//! reported as FAIL, never loosened.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multipath_correlation::analytic::{
    cycle_sum, derangement_sum, fringe_phase, g1_matrix, g1_polarized, g1_quadrature,
    g2, regime_fringe, visibility_of_values, QuadratureGrid,
};
use multipath_correlation::config::{Engine, ExperimentConfig, SweepParam, SweepSpec, Variant};
use multipath_correlation::experiment::{run_bell_curve, run_cnot_table};
use multipath_correlation::montecarlo::{estimate_correlator, estimate_family, EstimatorOptions, McSetup};
use multipath_correlation::network::PTypeStage;
use multipath_correlation::{
    DetectionSettings, NetworkSpec, PathGeometry, PolarizationSettings, RegimeThresholds,
    SpectralProfile,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn z(value: f64, reference: f64, std_error: f64) -> f64 {
    let diff = (value - reference).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / std_error
    }
}

/// Uniform grid over one period, end point excluded.
fn period(points: usize) -> Vec<f64> {
    (0..points).map(|k| 2.0 * PI * k as f64 / points as f64).collect()
}

fn scalar_at_phase(base: &PathGeometry, omega0: f64, phase: f64) -> PathGeometry {
    PathGeometry {
        l_c: base.l_c + phase * base.c / omega0,
        ..*base
    }
}

const TRIALS: u64 = 100_000;
const BATCHES: u64 = 20;

struct FringeData {
    phases: Vec<f64>,
    exact: Vec<f64>,
    g2: Vec<f64>,
    mc: Vec<(f64, f64)>,
    regime: Vec<f64>,
}

fn fringe_data() -> FringeData {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0).unwrap();
    let base = PathGeometry::balanced(100.0, 0.0);
    let det = DetectionSettings::equal_times(0.0);
    let th = RegimeThresholds::default();
    let phases = period(24);
    let mut data = FringeData {
        phases: phases.clone(),
        exact: vec![],
        g2: vec![],
        mc: vec![],
        regime: vec![],
    };
    let mut setups = Vec::new();
    for &p in &phases {
        let geom = scalar_at_phase(&base, profile.omega0, p);
        let spec = NetworkSpec::two_path_scalar(geom);
        let parts = g2(&spec, &det, &profile, &[]).unwrap();
        data.exact.push(parts.interference);
        data.g2.push(parts.total());
        data.regime.push(regime_fringe(&geom, &det, &profile, None, &th).unwrap().value);
        setups.push(McSetup::new(spec, vec![0.0, 0.0], vec![vec![]]));
    }
    let opts = EstimatorOptions::new(TRIALS, BATCHES, 2024);
    for out in estimate_family(&setups, &profile, &opts).unwrap() {
        data.mc.push((out[0].estimate, out[0].std_error));
    }
    data
}

fn criterion_1(d: &FringeData) -> Outcome {
    // 2 a^2 r^2 (1 + cos phi) with a = 1/2, r = 1
    let law: Vec<f64> = d.phases.iter().map(|p| 0.5 * (1.0 + p.cos())).collect();
    let peak = law.iter().cloned().fold(0.0, f64::max);
    let rel = d
        .exact
        .iter()
        .zip(&d.regime)
        .zip(&law)
        .map(|((e, r), l)| ((e - l).abs().max((r - l).abs())) / peak)
        .fold(0.0, f64::max);
    let worst_z = d
        .mc
        .iter()
        .zip(&law)
        .map(|(&(m, s), &l)| z(m, l, s))
        .fold(0.0, f64::max);
    outcome(
        rel < 1e-3 && worst_z < 3.0,
        format!("max relative deviation {rel:.3e} (< 1e-3), worst MC z-score {worst_z:.2} (< 3) over {} points", law.len()),
    )
}

fn criterion_2(d: &FringeData) -> Outcome {
    let analytic = visibility_of_values(&d.exact).unwrap();
    let mc = visibility_of_values(&d.mc.iter().map(|m| m.0).collect::<Vec<_>>()).unwrap();
    let g2v = visibility_of_values(&d.g2).unwrap();
    let pass = (analytic - 1.0).abs() <= 0.002 && (mc - 1.0).abs() <= 0.05 && (g2v - 1.0 / 3.0).abs() <= 0.002;
    outcome(
        pass,
        format!("correlator visibility {analytic:.6} (1 +- 0.002), MC {mc:.4} (1 +- 0.05), G2 visibility {g2v:.6} (1/3 +- 0.002)"),
    )
}

fn criterion_3() -> Outcome {
    let cfg = ExperimentConfig {
        variant: Variant::Cnot,
        engine: Engine::All,
        mc: multipath_correlation::config::McSettings {
            trials: TRIALS,
            batches: Some(BATCHES),
            seed: Some(31),
            workers: None,
        },
        ..ExperimentConfig::default()
    };
    let table = run_cnot_table(&cfg).unwrap();
    let mut on_min = f64::INFINITY;
    let mut off_max: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    for r in &table.rows {
        let a = r.analytic.unwrap();
        if r.expected == 1.0 {
            on_min = on_min.min(a);
        } else {
            off_max = off_max.max(a);
        }
        let (m, s) = r.mc.unwrap();
        worst_z = worst_z.max(z(m, a, s));
    }
    outcome(
        on_min >= 1.0 - 1e-9 && off_max <= 1e-9 && worst_z < 3.0,
        format!("truth-table cells min {on_min:.12}, off cells max {off_max:.1e}, worst MC z-score {worst_z:.2} (< 3)"),
    )
}

fn bell_config(engine: Engine, sweep: SweepSpec, theta_t: f64) -> ExperimentConfig {
    ExperimentConfig {
        variant: Variant::Cnot,
        engine,
        sweep: Some(sweep),
        polarization: PolarizationSettings::new(FRAC_PI_4, 0.0, 0.0, theta_t),
        mc: multipath_correlation::config::McSettings {
            trials: TRIALS,
            batches: Some(BATCHES),
            seed: Some(47),
            workers: None,
        },
        ..ExperimentConfig::default()
    }
}

fn criterion_4() -> Outcome {
    let exact = run_bell_curve(&bell_config(
        Engine::Analytic,
        SweepSpec::new(SweepParam::ThetaC, -PI / 2.0, PI, 37).unwrap(),
        0.3,
    ))
    .unwrap();
    let worst = exact.rows.iter().map(|r| r.deviation).fold(0.0, f64::max);

    let mc = run_bell_curve(&bell_config(
        Engine::MonteCarlo,
        SweepSpec::new(SweepParam::ThetaC, 0.0, 8.0 * PI / 9.0, 9).unwrap(),
        0.0,
    ))
    .unwrap();
    // Weighted least-squares amplitude of A cos^2, then RMS of the z residuals.
    let (mut num, mut den) = (0.0, 0.0);
    for r in &mc.rows {
        let (m, s) = r.mc.unwrap();
        num += m * r.expected / (s * s);
        den += r.expected * r.expected / (s * s);
    }
    let amp = num / den;
    let rms = (mc
        .rows
        .iter()
        .map(|r| {
            let (m, s) = r.mc.unwrap();
            ((m - amp * r.expected) / s).powi(2)
        })
        .sum::<f64>()
        / mc.rows.len() as f64)
        .sqrt();
    outcome(
        worst < 1e-9 && rms < 5.0,
        format!("max |normalized - cos^2| {worst:.1e} over 37 pairs (< 1e-9), MC fit amplitude {amp:.4}, RMS z-residual {rms:.2} (< 5)"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let (mut inside, mut outside) = (0, 0);
    let th = RegimeThresholds::default();
    for k in 0..100 {
        let dw = rng.random_range(0.5..2.0);
        let profile = SpectralProfile::new(rng.random_range(0.0..300.0), dw, rng.random_range(0.1..10.0)).unwrap();
        let in_regime = k % 2 == 0;
        let (geom, det) = if in_regime {
            let long = rng.random_range(60.0..100.0) / dw;
            let short = rng.random_range(0.0..5.0) / dw;
            let jitter = 0.01 / dw;
            let g = PathGeometry::new(
                long + rng.random_range(0.0..jitter),
                short + rng.random_range(0.0..jitter),
                long,
                short,
                1.0,
            )
            .unwrap();
            (g, DetectionSettings::equal_times(rng.random_range(-2.0..2.0)))
        } else {
            let g = PathGeometry::new(
                rng.random_range(0.0..8.0),
                rng.random_range(0.0..8.0),
                rng.random_range(0.0..8.0),
                rng.random_range(0.0..8.0),
                1.0,
            )
            .unwrap();
            (g, DetectionSettings::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
        };
        if multipath_correlation::check_regime(&geom, &det, &profile, &th).in_regime {
            inside += 1;
        } else {
            outside += 1;
        }
        let (spec, analyzers) = if k % 4 < 2 {
            (NetworkSpec::two_path_scalar(geom), vec![])
        } else {
            let a: Vec<f64> = (0..4).map(|_| rng.random_range(-PI..PI)).collect();
            (NetworkSpec::cnot(geom, a[0], a[1]), vec![a[2], a[3]])
        };
        let closed = g1_matrix(&spec, &[det.t_c, det.t_t], &profile, &analyzers).unwrap()[0][1];
        let quad = g1_quadrature(&spec, &det, &profile, &analyzers, &QuadratureGrid::default()).unwrap();
        worst = worst.max((closed - quad).norm() / profile.mean_rate);
    }
    outcome(
        worst < 1e-6,
        format!("max |G1 quadrature - closed form| / r = {worst:.2e} (< 1e-6), {inside} in-regime and {outside} out-of-regime configurations"),
    )
}

fn criterion_6() -> Outcome {
    let profile = SpectralProfile::new(1000.0, 1.0, 1.0).unwrap();
    // Cross pairs 10 coherence times apart.
    let geom = PathGeometry::balanced(10.0, 0.0);
    let spec = NetworkSpec::two_path_scalar(geom);
    let r = spec.detector_responses(&[]).unwrap();
    let (c, t) = (&r[0].terms, &r[1].terms);
    let kernel = |a: (Complex64, f64), b: (Complex64, f64)| {
        a.0.conj() * b.0 * multipath_correlation::analytic::gaussian_kernel(&profile, -a.1, -b.1)
    };
    let same = kernel(c[0], t[0]) + kernel(c[1], t[1]);
    let cross = kernel(c[0], t[1]) + kernel(c[1], t[0]);
    let ratio = 2.0 * cross.norm() / same.norm();

    // Same pairs 10 coherence times apart through the detection times.
    let base = PathGeometry::balanced(100.0, 0.0);
    let det = DetectionSettings::new(10.0, 0.0);
    let phases = period(24);
    let mut g2s = Vec::new();
    for &p in &phases {
        let s = NetworkSpec::two_path_scalar(scalar_at_phase(&base, profile.omega0, p));
        g2s.push(g2(&s, &det, &profile, &[]).unwrap().total());
    }
    let vis = visibility_of_values(&g2s).unwrap();
    let mc = estimate_correlator(
        &NetworkSpec::two_path_scalar(base),
        &[det.t_c, det.t_t],
        &profile,
        &[],
        &EstimatorOptions::new(TRIALS, BATCHES, 61),
    )
    .unwrap();
    let zscore = z(mc.estimate, 0.0, mc.std_error);
    outcome(
        ratio < 1e-20 && vis < 1e-3 && zscore < 3.0,
        format!("cross/same contribution {ratio:.2e} (< 1e-20), mismatched-time G2 visibility {vis:.2e} (< 1e-3), MC z-score from zero {zscore:.2} (< 3)"),
    )
}

fn criterion_7() -> Outcome {
    // Dyadic lengths keep every path sum exact in floating point, so the
    // invariance is tested without rounding in 100-coherence-length arms.
    let profile = SpectralProfile::new(512.0, 1.0, 1.0).unwrap();
    let det = DetectionSettings::equal_times(0.0);
    let mut unchanged: f64 = 0.0;
    for k in 0..13 {
        let base = PathGeometry::new(64.0 + k as f64 / 1024.0, 0.0, 64.0, 0.0, 1.0).unwrap();
        let a = g2(&NetworkSpec::two_path_scalar(base), &det, &profile, &[]).unwrap().interference;
        for delta in [0.5, 8.0, 32.25] {
            let moved = PathGeometry {
                l_c: base.l_c + delta,
                l_t: base.l_t + delta,
                ..base
            };
            let b = g2(&NetworkSpec::two_path_scalar(moved), &det, &profile, &[]).unwrap().interference;
            unchanged = unchanged.max((a - b).abs());
        }
    }

    let fast = SpectralProfile::new(1e5, 1.0, 1.0).unwrap();
    let base = PathGeometry::balanced(100.0, 0.0);
    let delta = 2e-5;
    let phases = period(36);
    let scan = |shift: f64| -> Vec<f64> {
        phases
            .iter()
            .map(|&p| {
                let g = PathGeometry {
                    l_c: scalar_at_phase(&base, fast.omega0, p).l_c + shift,
                    ..base
                };
                g2(&NetworkSpec::two_path_scalar(g), &det, &fast, &[]).unwrap().interference
            })
            .collect()
    };
    let measured = multipath_correlation::model::wrap_phase(fringe_phase(&phases, &scan(delta)) - fringe_phase(&phases, &scan(0.0)));
    let expected = multipath_correlation::model::wrap_phase(fast.omega0 * delta / base.c);
    let err = (measured - expected).abs();
    outcome(
        unchanged < 1e-12 && err < 1e-6,
        format!("equal shifts change the fringe by {unchanged:.1e} (< 1e-12), fitted translation {measured:.9} vs {expected:.9} (error {err:.1e} < 1e-6)"),
    )
}

fn three_channel() -> (NetworkSpec, Vec<f64>) {
    let spec = NetworkSpec::n_order(
        &[0.3, 0.9, -0.4],
        &[
            PTypeStage::control(80.0, 0.0),
            PTypeStage::target(80.0, 0.0),
            PTypeStage::control(80.0, 0.0),
        ],
        1.0,
    )
    .unwrap();
    (spec, vec![0.2, 0.5, 1.0])
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let profile = SpectralProfile::new(rng.random_range(0.0..200.0), 1.0, rng.random_range(0.5..3.0)).unwrap();
        let l: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..80.0)).collect();
        let geom = PathGeometry::new(l[0], l[1], l[2], l[3], 1.0).unwrap();
        let det = DetectionSettings::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let a: Vec<f64> = (0..4).map(|_| rng.random_range(-PI..PI)).collect();
        let pol = PolarizationSettings::new(a[0], a[1], a[2], a[3]);
        let spec = NetworkSpec::cnot_as_n_order(&geom, pol.phi_c, pol.phi_t);
        let g = g1_matrix(&spec, &[det.t_c, det.t_t], &profile, &[pol.theta_c, pol.theta_t]).unwrap();
        let direct = g1_polarized(&geom, &det, &profile, &pol).norm_sqr();
        let r2 = profile.mean_rate * profile.mean_rate;
        worst = worst.max((cycle_sum(&g).unwrap() - direct).abs() / r2);
    }

    let profile = SpectralProfile::new(1000.0, 1.0, 1.0).unwrap();
    let (spec, analyzers) = three_channel();
    let times = [0.0; 3];
    let g = g1_matrix(&spec, &times, &profile, &analyzers).unwrap();
    let cycles = cycle_sum(&g).unwrap();
    let moment = derangement_sum(&g).unwrap();
    let mc = estimate_correlator(&spec, &times, &profile, &analyzers, &EstimatorOptions::new(200_000, BATCHES, 83)).unwrap();
    let zscore = z(mc.estimate, cycles, mc.std_error);
    outcome(
        worst < 1e-12 && zscore < 4.0 && (cycles - moment).abs() < 1e-15,
        format!("N=2 |cycle sum - |G1|^2| / r^2 = {worst:.1e} (< 1e-12); N=3 cycle sum {cycles:.6e}, MC {:.6e} +- {:.1e}, z-score {zscore:.2} (< 4)", mc.estimate, mc.std_error),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_multipath");
    let run = |args: &[&str], name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .args(args)
            .args(["--out", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success(), "{args:?}");
        std::fs::read(path).unwrap()
    };
    let sweep = ["sweep", "--engine", "mc", "--seed", "99", "--trials", "4000", "--batches", "20", "--sweep", "phase:0:2*pi:7"];
    let cnot = ["cnot-table", "--engine", "mc", "--seed", "99", "--trials", "2000", "--batches", "16"];
    let mut identical = true;
    for (args, tag) in [(&sweep[..], "sweep"), (&cnot[..], "cnot")] {
        let one = run(&[args, &["--workers", "1"]].concat(), &format!("{tag}-1.csv"));
        let again = run(&[args, &["--workers", "1"]].concat(), &format!("{tag}-1b.csv"));
        let three = run(&[args, &["--workers", "3"]].concat(), &format!("{tag}-3.csv"));
        identical &= one == again && one == three && !one.is_empty();
    }
    outcome(identical, "sweep and cnot-table CSVs byte-identical across reruns and 1 vs 3 workers".into())
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |index: usize, name: &str, run: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {index} {name}: {status} [{:.1}s] {}", start.elapsed().as_secs_f64(), out.detail);
        if !out.pass {
            failures += 1;
        }
    };
    let start = Instant::now();
    let fringe = fringe_data();
    println!("shared fringe scan with Monte Carlo: {:.1}s", start.elapsed().as_secs_f64());
    report(1, "fringe law", &|| criterion_1(&fringe));
    report(2, "visibilities", &|| criterion_2(&fringe));
    report(3, "cnot truth table", &criterion_3);
    report(4, "bell curve", &criterion_4);
    report(5, "oracle equivalence", &criterion_5);
    report(6, "regime suppression", &criterion_6);
    report(7, "phase-difference law", &criterion_7);
    report(8, "gaussian moments and n-order", &criterion_8);
    report(9, "determinism", &criterion_9);
    if failures == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
