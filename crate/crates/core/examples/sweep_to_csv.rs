//! A small sweep written as CSV, the same rows `wcsim run` emits.

use wcsim::harness::{run_sweep, write_csv};
use wcsim::{Algorithm, SweepSpec};

fn main() -> wcsim::Result<()> {
    let spec = SweepSpec {
        algorithm: vec![Algorithm::Randomized, Algorithm::Hierarchical, Algorithm::QHierarchical],
        n: vec![16, 64],
        trials: 3,
        alpha: 2.0,
        seed: 42,
        ..SweepSpec::default()
    };
    let results = run_sweep(&spec)?;
    write_csv(&results, std::io::stdout().lock())
}
