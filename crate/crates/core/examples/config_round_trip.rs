//! Load an experiment file, run it, and print the canonical form.

use std::path::Path;

use multipath_correlation::config::ExperimentConfig;
use multipath_correlation::experiment::run_sweep;

fn main() -> multipath_correlation::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/scalar_fringe.cfg");
    let cfg = ExperimentConfig::from_file(&path)?;
    print!("{}", cfg.to_text());
    println!();
    print!("{}", run_sweep(&cfg)?.table.to_csv());
    Ok(())
}
