//! Quantized consensus on a four-symbol alphabet: the index sum never moves
//! and the run ends with every node within one symbol.

use wcsim::consensus::SlotView;
use wcsim::harness::{trial_measurements, trial_placement};
use wcsim::{consensus, Algorithm, RunConfig};

fn main() -> wcsim::Result<()> {
    let cfg = RunConfig { alpha: 2.0, k_slots: 2, gamma_db: 0.0, seed: 11, ..RunConfig::new(Algorithm::QConsensus, 64) };
    let (placement, _) = trial_placement(&cfg)?;
    let z0 = trial_measurements(&cfg);
    let mut sums = Vec::new();
    let mut obs = |v: SlotView<'_>| sums.push(v.indices.expect("quantized state").iter().sum::<u64>());
    let r = consensus::run_observed(&cfg, &placement, &z0, &mut obs)?;
    println!("L = {:?}, converged {} after {} slots", cfg.quantizer()?.levels(), r.converged, r.t_slots);
    println!("index sum {} -> {}", sums.first().unwrap_or(&0), sums.last().unwrap_or(&0));
    let mut values = r.final_estimates.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    println!("final values {values:?}, mse {:.4e}", r.mse.unwrap());
    Ok(())
}
