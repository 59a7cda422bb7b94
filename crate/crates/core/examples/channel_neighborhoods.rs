//! Who hears whom: single transmitters and cooperating clusters.

use wcsim::channel::{self, ChannelParams, PhaseMode, PowerAssignment, TransmitterKind};
use wcsim::topology::place_nodes;

fn main() -> wcsim::Result<()> {
    let p = place_nodes(12, 1)?;
    let params = ChannelParams::with_default_g(2.0, 10.0, PhaseMode::Fixed)?;

    // every node reaches distance 0.3
    let power = params.required_power(0.3);
    let powers = PowerAssignment::new(1, TransmitterKind::Node, vec![power; p.len()])?;
    for n in 0..p.len() {
        println!("node {n:>2} hears {:?}", channel::node_neighborhood(&params, &p, &powers, n));
    }

    // two clusters: the first six nodes and the rest, split powers evenly
    let clusters = vec![(0..6).collect::<Vec<_>>(), (6..12).collect()];
    for phase in [PhaseMode::Fixed, PhaseMode::Uniform] {
        let params = params.with_phase(phase);
        let cp = PowerAssignment::new(1, TransmitterKind::Cluster, vec![power / 6.0; p.len()])?;
        let heard: Vec<Vec<usize>> = (0..p.len()).map(|n| channel::cluster_neighborhood(&params, &p, &clusters, &cp, n)).collect();
        println!("{}: cluster neighborhoods {heard:?}", phase.as_str());
    }
    Ok(())
}
