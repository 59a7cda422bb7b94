//! Frequency slots of one gossip slot: greedy coloring of the two-hop graph
//! against the exact chromatic number.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcsim::consensus::{random_matching, GossipGraph};
use wcsim::spectrum::greedy_coloring;
use wcsim::topology::place_nodes;
use wcsim::{oracle, ChannelParams, PhaseMode};

fn main() -> wcsim::Result<()> {
    let p = place_nodes(256, 5)?;
    let params = ChannelParams::with_default_g(4.0, 10.0, PhaseMode::Fixed)?;
    let g = GossipGraph::new(&params, &p, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tx: Vec<usize> = random_matching(&g.links, &mut rng).into_iter().flat_map(|(a, b)| [a, b]).collect();
    tx.sort_unstable();
    let mut counts = Vec::new();
    let rec = g.slot_record(1, &tx, &mut counts);
    println!(
        "{} transmitters: max neighborhood {} <= B(t) = {} <= max degree + 1 = {}",
        rec.transmitters,
        rec.max_neighborhood,
        rec.freq_slots,
        rec.max_conflict_degree + 1
    );

    // a small corner of the same graph is cheap to color exactly
    let corner: Vec<usize> = tx.iter().copied().filter(|&v| p.position(v).x < 0.2 && p.position(v).y < 0.2).take(12).collect();
    let sub = g.conflicts.induced(&corner);
    println!("corner with {} transmitters: greedy {}, exact {}", corner.len(), greedy_coloring(&sub).count, oracle::chromatic_number(&sub));
    Ok(())
}
