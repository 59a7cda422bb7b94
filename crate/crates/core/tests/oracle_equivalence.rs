use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wcsim::channel::{self, ChannelParams, PhaseMode, PowerAssignment, TransmitterKind};
use wcsim::consensus::{route, GossipGraph};
use wcsim::spectrum::{greedy_coloring, slot_spectrum, two_hop_square, ConflictGraph};
use wcsim::topology::{gossip_radius, is_connected, place_nodes};
use wcsim::oracle;

#[test]
fn small_graph_colorings_never_beat_chromatic_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.4)).collect();
        let g = ConflictGraph::from_edges(n, &edges).unwrap();
        let greedy = greedy_coloring(&g).count;
        let chi = oracle::chromatic_number(&g);
        assert!(chi <= greedy && greedy <= g.max_degree() + 1);
    }
}

#[test]
fn known_chromatic_numbers() {
    let triangle = ConflictGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    assert_eq!(oracle::chromatic_number(&triangle), 3);
    let c5: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    assert_eq!(oracle::chromatic_number(&ConflictGraph::from_edges(5, &c5).unwrap()), 3);
    let c6: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    assert_eq!(oracle::chromatic_number(&ConflictGraph::from_edges(6, &c6).unwrap()), 2);
    assert_eq!(oracle::chromatic_number(&ConflictGraph::empty(4)), 1);
}

#[test]
fn gossip_links_and_conflicts_match_oracle() {
    for seed in 0..20 {
        let p = place_nodes(32, seed).unwrap();
        let params = ChannelParams::with_default_g(4.0, 10.0, PhaseMode::Fixed).unwrap();
        let g = GossipGraph::new(&params, &p, 2.0);
        let all = PowerAssignment::new(1, TransmitterKind::Node, vec![g.power; 32]).unwrap();
        let heard: Vec<Vec<usize>> = (0..32).map(|n| oracle::node_neighborhood(&params, &p, all.powers(), n)).collect();
        assert_eq!(g.links, oracle::pairwise_one_hop(&heard));
        assert_eq!(g.conflicts, oracle::bfs_square(&g.links));
        let r = gossip_radius(32, 2.0);
        assert_eq!(is_connected(&p, r), oracle::connected_at_radius(&p, r));
        assert_eq!(g.is_connected(), is_connected(&p, r));
    }
}

#[test]
fn routes_are_shortest() {
    for seed in 0..10 {
        let p = place_nodes(32, seed).unwrap();
        let params = ChannelParams::with_default_g(2.0, 10.0, PhaseMode::Fixed).unwrap();
        let g = GossipGraph::new(&params, &p, 2.0);
        let dist = oracle::bfs_distances(&g.links, 0);
        for b in 1..32 {
            match (route(&g.links, 0, b), dist[b]) {
                (Some(r), Some(d)) => {
                    assert_eq!(r.len(), d + 1);
                    assert!(r.windows(2).all(|w| g.links.has_edge(w[0], w[1])));
                }
                (None, None) => {}
                other => panic!("route and BFS disagree: {other:?}"),
            }
        }
    }
}

#[test]
fn slot_spectrum_against_oracle_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..50 {
        let n = rng.gen_range(4..=32);
        let p = place_nodes(n, seed).unwrap();
        let params = ChannelParams::with_default_g(3.0, 10.0, PhaseMode::Uniform).unwrap();
        let mut powers = PowerAssignment::silent(1, TransmitterKind::Node, n);
        for m in 0..n {
            if rng.gen_bool(0.5) {
                powers.set(m, params.required_power(rng.gen_range(0.05..0.5)));
            }
        }
        let heard: Vec<Vec<usize>> = (0..n).map(|v| channel::node_neighborhood(&params, &p, &powers, v)).collect();
        let tx: Vec<usize> = powers.active().collect();
        let s = slot_spectrum(&heard, &tx);
        let square = oracle::bfs_square(&oracle::pairwise_one_hop(&heard));
        assert_eq!(square, two_hop_square(&oracle::pairwise_one_hop(&heard)));
        let induced = square.induced(&tx);
        assert_eq!(s.max_conflict_degree, induced.max_degree());
        if tx.is_empty() {
            assert_eq!(s.freq_slots, 0);
        } else {
            assert!(s.max_neighborhood <= s.freq_slots && s.freq_slots <= induced.max_degree() + 1);
        }
    }
}
