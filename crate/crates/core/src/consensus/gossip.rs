use rand::seq::SliceRandom;
use rand::Rng;

use super::{EstimateVector, Observer, RunConfig, SlotView};
use crate::channel::ChannelParams;
use crate::error::{invalid, Result};
use crate::harness::{derive_stream, Purpose};
use crate::ledger::{Ledger, RunResult, SlotRecord};
use crate::spectrum::{greedy_coloring_on, two_hop_square, ConflictGraph};
use crate::topology::{gossip_radius, NodePlacement};

/// The fixed-power graph the gossip-family algorithms exchange over.
#[derive(Debug, Clone)]
pub struct GossipGraph {
    /// Per-node transmit power `(gamma/G) r^alpha`.
    pub power: f64,
    pub radius: f64,
    /// `{m, n}` iff `n` hears `m` at the gossip power.
    pub links: ConflictGraph,
    /// Links plus pairs sharing a common neighbor. Restricted to the
    /// transmitters of a slot, this is that slot's two-hop conflict graph.
    pub conflicts: ConflictGraph,
}

impl GossipGraph {
    pub fn new(params: &ChannelParams, placement: &NodePlacement, radius_c: f64) -> Self {
        let radius = gossip_radius(placement.len(), radius_c);
        let power = params.required_power(radius);
        let n = placement.len();
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if params.hears(placement.distance(a, b), power) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        let links = ConflictGraph::from_sorted_adjacency(adj);
        let conflicts = two_hop_square(&links);
        Self { power, radius, links, conflicts }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.links.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.links.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Slot record for a slot in which `transmitters` (sorted) send at the
    /// gossip power.
    pub fn slot_record(&self, slot: u64, transmitters: &[usize], counts: &mut Vec<u32>) -> SlotRecord {
        counts.clear();
        counts.resize(self.links.vertex_count(), 0);
        for &s in transmitters {
            for &w in self.links.neighbors(s) {
                counts[w] += 1;
            }
        }
        let coloring = greedy_coloring_on(&self.conflicts, transmitters);
        SlotRecord {
            slot,
            power: self.power * transmitters.len() as f64,
            freq_slots: coloring.count as u64,
            transmitters: transmitters.len() as u64,
            max_neighborhood: counts.iter().copied().max().unwrap_or(0) as u64,
            max_conflict_degree: coloring.max_degree as u64,
        }
    }
}

/// Maximal matching: nodes are visited in random order and each unmatched
/// node pairs with a uniformly chosen unmatched neighbor, if any.
pub fn random_matching<R: Rng + ?Sized>(graph: &ConflictGraph, rng: &mut R) -> Vec<(usize, usize)> {
    let n = graph.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut matched = vec![false; n];
    let mut free = Vec::new();
    let mut pairs = Vec::new();
    for v in order {
        if matched[v] {
            continue;
        }
        free.clear();
        free.extend(graph.neighbors(v).iter().copied().filter(|&u| !matched[u]));
        if let Some(&u) = free.choose(rng) {
            matched[v] = true;
            matched[u] = true;
            pairs.push((v, u));
        }
    }
    pairs
}

pub(crate) fn connected_graph(cfg: &RunConfig, placement: &NodePlacement) -> Result<(ChannelParams, GossipGraph)> {
    let params = cfg.channel()?;
    let graph = GossipGraph::new(&params, placement, cfg.radius_c);
    if !graph.is_connected() {
        return invalid(format!("gossip graph at radius {:.4} is disconnected", graph.radius));
    }
    Ok((params, graph))
}

/// Synchronous randomized gossip: each slot a random matching is drawn and
/// matched pairs average.
pub fn randomized_gossip_run(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64], obs: &mut dyn Observer) -> Result<RunResult> {
    let (_, graph) = connected_graph(cfg, placement)?;
    let mut rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Matching);
    let mut state = EstimateVector::new(z0.to_vec())?;
    let mut ledger = Ledger::new(cfg.k_slots, cfg.keep_history);
    let cap = cfg.slot_cap();
    let mut converged = state.reached(cfg.epsilon)?;
    let mut transmitters = Vec::with_capacity(cfg.n);
    let mut counts = Vec::new();
    while !converged && state.t < cap {
        let pairs = random_matching(&graph.links, &mut rng);
        state.t += 1;
        transmitters.clear();
        for &(a, b) in &pairs {
            let avg = 0.5 * (state.z[a] + state.z[b]);
            state.z[a] = avg;
            state.z[b] = avg;
            transmitters.push(a);
            transmitters.push(b);
        }
        transmitters.sort_unstable();
        ledger.record_slot(graph.slot_record(state.t, &transmitters, &mut counts))?;
        obs.observe(SlotView { slot: state.t, estimates: &state.z, indices: None, level: None });
        converged = state.reached(cfg.epsilon)?;
    }
    Ok(RunResult::from_ledger(cfg, ledger, state.z, None, converged))
}
