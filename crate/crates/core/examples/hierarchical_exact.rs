//! Hierarchical averaging reaches the exact mean; per-level slot costs.

use wcsim::consensus::SlotView;
use wcsim::harness::{trial_measurements, trial_placement};
use wcsim::{consensus, Algorithm, PhaseMode, RunConfig};

fn main() -> wcsim::Result<()> {
    for phase in [PhaseMode::Fixed, PhaseMode::Uniform] {
        let cfg = RunConfig { phase, seed: 3, ..RunConfig::new(Algorithm::Hierarchical, 1024) };
        let (placement, _) = trial_placement(&cfg)?;
        let z0 = trial_measurements(&cfg);
        let mean = z0.iter().sum::<f64>() / z0.len() as f64;

        let mut levels = Vec::new();
        let mut obs = |v: SlotView<'_>| levels.push(v.level);
        let r = consensus::run_observed(&cfg, &placement, &z0, &mut obs)?;
        let worst = r.final_estimates.iter().map(|z| (z - mean).abs()).fold(0.0, f64::max);
        println!("{}: T = {}, B = {}, E = {:.4e}, worst |z - mean| = {worst:.2e}", phase.as_str(), r.t_slots, r.b_tbp, r.e_energy);
        for (rec, level) in r.ledger.history().iter().zip(&levels) {
            println!("  slot {:>2} level {:?}: {:>4} transmitters, B(t) = {:>3}, power {:.3e}", rec.slot, level, rec.transmitters, rec.freq_slots, rec.power);
        }
    }
    Ok(())
}
