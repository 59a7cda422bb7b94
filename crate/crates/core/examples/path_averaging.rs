//! One path-averaging run with its exchanges listed.

use wcsim::consensus::{path_averaging_run, route, GossipGraph};
use wcsim::harness::{trial_measurements, trial_placement};
use wcsim::{Algorithm, RunConfig};

fn main() -> wcsim::Result<()> {
    let cfg = RunConfig { alpha: 2.0, epsilon: 1e-2, seed: 7, ..RunConfig::new(Algorithm::Path, 128) };
    let (placement, _) = trial_placement(&cfg)?;
    let z0 = trial_measurements(&cfg);

    let graph = GossipGraph::new(&cfg.channel()?, &placement, cfg.radius_c);
    let r0 = route(&graph.links, 0, 127).expect("connected");
    println!("route 0 -> 127: {r0:?}");

    let r = path_averaging_run(&cfg, &placement, &z0, &mut ())?;
    println!("{} exchanges, T = {} slots, E = {:.4e}", r.ledger.exchanges().len(), r.t_slots, r.e_energy);
    for ex in r.ledger.exchanges().iter().take(5) {
        println!("  {} nodes over slots {}..={}", ex.path_len, ex.first_slot, ex.last_slot);
    }
    Ok(())
}
