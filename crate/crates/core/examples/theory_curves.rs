//! Order-of-growth curves the plots overlay on measured medians.

use wcsim::ledger::{theory_curve, Metric, Scheme, TheoryParams};
use wcsim::PhaseMode;

fn main() -> wcsim::Result<()> {
    let p = TheoryParams { alpha: 2.0, epsilon: 1e-4, kappa: 1e-4, k: 10, u: 0.0, phase: PhaseMode::Fixed };
    let schemes = [Scheme::RandomizedGossip, Scheme::PathAveraging, Scheme::Hierarchical, Scheme::LowerBound];
    for metric in [Metric::Time, Metric::Energy, Metric::TimeBandwidth] {
        println!("{metric:?}");
        for n in [64.0, 256.0, 1024.0] {
            let row: Vec<String> = schemes.iter().map(|&s| theory_curve(s, metric, n, &p).map(|v| format!("{v:.3e}"))).collect::<wcsim::Result<_>>()?;
            println!("  N = {n:>5}: {}", row.join("  "));
        }
    }
    Ok(())
}
