//! Quantized hierarchical averaging: error against alphabet size.

use wcsim::{run_trial, Algorithm, RunConfig};

fn main() -> wcsim::Result<()> {
    let trials = 20;
    println!("{:>3} {:>10} {:>12} {:>10}", "K", "L", "mean mse", "B");
    for k in [2, 4, 6, 8, 20] {
        let mut total = 0.0;
        let mut b = 0;
        for trial in 0..trials {
            let gamma_db = if k == 20 { 10.0 } else { 0.0 };
            let cfg = RunConfig { alpha: 2.0, k_slots: k, gamma_db, trial, keep_history: false, ..RunConfig::new(Algorithm::QHierarchical, 256) };
            let r = run_trial(&cfg)?;
            total += r.mse.unwrap_or(0.0);
            b = r.b_tbp;
        }
        let spec = RunConfig { k_slots: k, gamma_db: if k == 20 { 10.0 } else { 0.0 }, ..RunConfig::new(Algorithm::QHierarchical, 256) }.quantizer()?;
        let l = spec.levels().map_or("exact".to_string(), |l| l.to_string());
        println!("{k:>3} {l:>10} {:>12.4e} {b:>10}", total / trials as f64);
    }
    Ok(())
}
