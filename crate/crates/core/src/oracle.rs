//! Brute-force reference computations.
//!
//! Each function here takes the slow, literal route: pairwise loops, BFS,
//! exhaustive search. They back the `wcsim oracle` subcommands and the test
//! suites, and deliberately share no code with the fast paths they check.

use std::collections::VecDeque;

use crate::channel::{ChannelParams, PhaseMode};
use crate::spectrum::ConflictGraph;
use crate::topology::NodePlacement;

/// Exact chromatic number by backtracking. Intended for at most ~20 vertices.
pub fn chromatic_number(g: &ConflictGraph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    (1..=n).find(|&k| colorable(g, k)).expect("n colors always suffice")
}

fn colorable(g: &ConflictGraph, k: usize) -> bool {
    fn go(g: &ConflictGraph, v: usize, k: usize, colors: &mut Vec<usize>) -> bool {
        if v == g.vertex_count() {
            return true;
        }
        // symmetry break: vertex v may use at most one color beyond those seen so far
        let used = colors[..v].iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..k.min(used + 1) {
            if g.neighbors(v).iter().all(|&u| u >= v || colors[u] != c) {
                colors[v] = c;
                if go(g, v + 1, k, colors) {
                    return true;
                }
            }
        }
        colors[v] = usize::MAX;
        false
    }
    let mut colors = vec![usize::MAX; g.vertex_count()];
    go(g, 0, k, &mut colors)
}

pub fn bfs_distances(g: &ConflictGraph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &u in g.neighbors(v) {
            if dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Square via per-vertex BFS: `{i, j}` iff their distance is 1 or 2.
pub fn bfs_square(g: &ConflictGraph) -> ConflictGraph {
    let mut edges = Vec::new();
    for i in 0..g.vertex_count() {
        for (j, d) in bfs_distances(g, i).into_iter().enumerate() {
            if j > i && matches!(d, Some(1) | Some(2)) {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::from_edges(g.vertex_count(), &edges).expect("BFS edges are valid")
}

/// One-hop graph by testing every pair directly.
pub fn pairwise_one_hop(heard: &[Vec<usize>]) -> ConflictGraph {
    let n = heard.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if heard[i].contains(&j) || heard[j].contains(&i) {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::from_edges(n, &edges).expect("pairwise edges are valid")
}

/// Node neighborhood in the power-radius form `P_m >= (gamma/G) d^alpha`.
pub fn node_neighborhood(params: &ChannelParams, placement: &NodePlacement, powers: &[f64], n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for m in 0..placement.len() {
        if m == n || powers[m] <= 0.0 {
            continue;
        }
        let d = placement.distance(m, n);
        let need = params.gamma() / params.g() * d.powf(params.alpha());
        if powers[m] >= need * (1.0 - crate::channel::LINK_TOLERANCE) {
            out.push(m);
        }
    }
    out
}

/// Cluster neighborhood written directly from the coherent and incoherent
/// threshold forms (`... >= gamma / G`).
pub fn cluster_neighborhood(
    params: &ChannelParams,
    placement: &NodePlacement,
    clusters: &[Vec<usize>],
    powers: &[f64],
    n: usize,
) -> Vec<usize> {
    let threshold = params.gamma() / params.g() * (1.0 - crate::channel::LINK_TOLERANCE);
    let mut out = Vec::new();
    for (j, members) in clusters.iter().enumerate() {
        if members.contains(&n) || members.iter().all(|&m| powers[m] <= 0.0) {
            continue;
        }
        let mut acc = 0.0;
        for &m in members {
            let d = placement.distance(m, n);
            acc += match params.phase() {
                PhaseMode::Fixed => (powers[m] / d.powf(params.alpha())).sqrt(),
                PhaseMode::Uniform => powers[m] / d.powf(params.alpha()),
            };
        }
        let metric = match params.phase() {
            PhaseMode::Fixed => acc * acc,
            PhaseMode::Uniform => acc,
        };
        if metric >= threshold {
            out.push(j);
        }
    }
    out
}

/// Clusters heard by any member of cluster `receiver`, by scanning every
/// (cluster, node) pair.
pub fn cluster_of_cluster_neighborhood(
    params: &ChannelParams,
    placement: &NodePlacement,
    clusters: &[Vec<usize>],
    powers: &[f64],
    receiver: usize,
) -> Vec<usize> {
    (0..clusters.len())
        .filter(|&j| {
            clusters[receiver]
                .iter()
                .any(|&n| cluster_neighborhood(params, placement, clusters, powers, n).contains(&j))
        })
        .collect()
}

/// Union-find over the geometric graph at `radius`.
pub fn connected_at_radius(placement: &NodePlacement, radius: f64) -> bool {
    let n = placement.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for a in 0..n {
        for b in a + 1..n {
            if placement.distance(a, b) <= radius {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                    components -= 1;
                }
            }
        }
    }
    components == 1
}
