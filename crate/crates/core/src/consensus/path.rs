use std::collections::VecDeque;

use rand::Rng;

use super::gossip::connected_graph;
use super::{EstimateVector, Observer, RunConfig, SlotView};
use crate::error::Result;
use crate::harness::{derive_stream, Purpose};
use crate::ledger::{ExchangeRecord, Ledger, RunResult, SlotRecord};
use crate::spectrum::ConflictGraph;
use crate::topology::NodePlacement;

/// Shortest-hop route from `from` to `to`, endpoints included. Among equal
/// length routes, each hop goes to the lowest-id neighbor that stays on a
/// shortest route. `None` if `to` is unreachable.
pub fn route(graph: &ConflictGraph, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = graph.vertex_count();
    let mut dist = vec![usize::MAX; n];
    dist[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        if v == from {
            break;
        }
        for &u in graph.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[from] == usize::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut at = from;
    while at != to {
        // neighbors are sorted, so the first hit is the lowest id
        at = *graph.neighbors(at).iter().find(|&&u| dist[u] == dist[at] - 1).expect("BFS tree has a parent");
        path.push(at);
    }
    Some(path)
}

/// Sequential path averaging: a random ordered pair is routed, the route's
/// estimates are summed hop by hop towards the destination and the average
/// is sent back, one transmission per slot.
pub fn path_averaging_run(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64], obs: &mut dyn Observer) -> Result<RunResult> {
    let (_, graph) = connected_graph(cfg, placement)?;
    let mut rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Pairs);
    let mut state = EstimateVector::new(z0.to_vec())?;
    let mut ledger = Ledger::new(cfg.k_slots, cfg.keep_history);
    let cap = cfg.slot_cap();
    let n = cfg.n;
    let mut converged = state.reached(cfg.epsilon)?;
    while !converged && state.t < cap {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let path = route(&graph.links, a, b).expect("gossip graph is connected");
        let hops = path.len() as u64 - 1;
        let first_slot = state.t + 1;
        for _ in 0..2 * hops {
            state.t += 1;
            ledger.record_slot(SlotRecord {
                slot: state.t,
                power: graph.power,
                freq_slots: 1,
                transmitters: 1,
                // the next hop hears the single transmitter
                max_neighborhood: 1,
                max_conflict_degree: 0,
            })?;
        }
        ledger.record_exchange(ExchangeRecord { path_len: path.len() as u64, first_slot, last_slot: state.t });
        let avg = path.iter().map(|&v| state.z[v]).sum::<f64>() / path.len() as f64;
        for &v in &path {
            state.z[v] = avg;
        }
        obs.observe(SlotView { slot: state.t, estimates: &state.z, indices: None, level: None });
        converged = state.reached(cfg.epsilon)?;
    }
    Ok(RunResult::from_ledger(cfg, ledger, state.z, None, converged))
}
