//! Placement CSV round trip and the gossip edge list of the same nodes.

use wcsim::consensus::GossipGraph;
use wcsim::topology::{gossip_radius, place_nodes};
use wcsim::{ChannelParams, NodePlacement, PhaseMode};

fn main() -> wcsim::Result<()> {
    let p = place_nodes(20, 9)?;
    let mut csv = Vec::new();
    p.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    let back = NodePlacement::read_csv(csv.as_slice())?;
    assert_eq!(back.positions(), p.positions());

    let params = ChannelParams::with_default_g(4.0, 10.0, PhaseMode::Fixed)?;
    let g = GossipGraph::new(&params, &back, 2.0);
    println!("radius {:.4} (expected {:.4}), connected {}", g.radius, gossip_radius(20, 2.0), g.is_connected());
    g.links.write_edge_list(std::io::stdout().lock())?;
    Ok(())
}
