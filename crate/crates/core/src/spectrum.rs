//! Frequency-slot accounting: one-hop conflict graphs, their two-hop
//! squares, and greedy coloring.
//!
//! Every incoming signal at a receiver needs its own frequency slot, so two
//! transmitters conflict when they are within two hops of each other. The
//! stations of a slot (nodes, or clusters for cooperative slots) form the
//! one-hop graph; the slot's transmitters are colored on the square of that
//! graph and the color count is the slot's bandwidth `B(t)`.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::error::{invalid, Result};

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictGraph {
    adj: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return invalid(format!("edge ({a}, {b}) references a vertex outside 0..{n}"));
            }
            if a == b {
                return invalid(format!("self-loop on vertex {a}"));
            }
            sets[a].insert(b);
            sets[b].insert(a);
        }
        Ok(Self::from_sets(sets))
    }

    fn from_sets(sets: Vec<BTreeSet<usize>>) -> Self {
        Self { adj: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    /// Builds from adjacency lists that are already symmetric, sorted and
    /// loop-free.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(adj.iter().enumerate().all(|(v, ns)| ns.windows(2).all(|w| w[0] < w[1]) && !ns.contains(&v)));
        Self { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// Subgraph induced on `keep`; vertex `k` of the result is `keep[k]`.
    pub fn induced(&self, keep: &[usize]) -> ConflictGraph {
        let mut pos = vec![usize::MAX; self.adj.len()];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                let mut ns: Vec<usize> = self.adj[v].iter().map(|&u| pos[u]).filter(|&p| p != usize::MAX).collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        ConflictGraph { adj }
    }

    /// Writes `# vertices N` followed by one `a b` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# vertices {}", self.vertex_count())?;
        for (a, b) in self.edges() {
            writeln!(w, "{a} {b}")?;
        }
        Ok(())
    }

    /// Parses the format written by [`ConflictGraph::write_edge_list`]. Without a
    /// vertex header the vertex count is one past the largest id.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(n) = rest.trim().strip_prefix("vertices") {
                    declared = Some(n.trim().parse::<usize>().map_err(|e| crate::Error::InvalidArgument(e.to_string()))?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => edges.push((a, b)),
                _ => return invalid(format!("malformed edge line '{line}'")),
            }
        }
        let implied = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::from_edges(declared.unwrap_or(implied).max(implied), &edges)
    }
}

/// Symmetrized one-hop graph: `heard[i]` lists the stations station `i`
/// hears; `{i, j}` is an edge iff either hears the other.
pub fn build_one_hop_graph(heard: &[Vec<usize>]) -> ConflictGraph {
    let mut adj = vec![Vec::new(); heard.len()];
    for (i, hs) in heard.iter().enumerate() {
        for &j in hs {
            if j != i {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for ns in &mut adj {
        ns.sort_unstable();
        ns.dedup();
    }
    ConflictGraph { adj }
}

/// Joins every pair at graph distance one or two.
pub fn two_hop_square(g: &ConflictGraph) -> ConflictGraph {
    let n = g.vertex_count();
    let mut stamp = vec![usize::MAX; n];
    let mut adj = Vec::with_capacity(n);
    for v in 0..n {
        stamp[v] = v;
        let mut ns = Vec::new();
        for &u in g.neighbors(v) {
            if stamp[u] != v {
                stamp[u] = v;
                ns.push(u);
            }
            for &w in g.neighbors(u) {
                if stamp[w] != v {
                    stamp[w] = v;
                    ns.push(w);
                }
            }
        }
        ns.sort_unstable();
        adj.push(ns);
    }
    ConflictGraph { adj }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    /// `colors[k]` is the color of the `k`-th colored vertex.
    pub colors: Vec<usize>,
    pub count: usize,
    /// Largest degree within the colored (induced) subgraph.
    pub max_degree: usize,
}

/// Greedy coloring of the subgraph induced on `vertices`, visiting vertices
/// by descending induced degree with ties broken by ascending id.
pub fn greedy_coloring_on(g: &ConflictGraph, vertices: &[usize]) -> Coloring {
    if vertices.is_empty() {
        return Coloring { colors: Vec::new(), count: 0, max_degree: 0 };
    }
    let mut pos = vec![usize::MAX; g.vertex_count()];
    for (k, &v) in vertices.iter().enumerate() {
        pos[v] = k;
    }
    let degree: Vec<usize> = vertices
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&u| pos[u] != usize::MAX).count())
        .collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_unstable_by_key(|&k| (std::cmp::Reverse(degree[k]), vertices[k]));

    const UNCOLORED: usize = usize::MAX;
    let mut colors = vec![UNCOLORED; vertices.len()];
    let mut used = vec![usize::MAX; max_degree + 2];
    let mut count = 0;
    for &k in &order {
        for &u in g.neighbors(vertices[k]) {
            let p = pos[u];
            if p != usize::MAX && colors[p] != UNCOLORED {
                used[colors[p]] = k;
            }
        }
        let c = (0..).find(|&c| used[c] != k).expect("a free color exists below max_degree + 2");
        colors[k] = c;
        count = count.max(c + 1);
    }
    Coloring { colors, count, max_degree }
}

pub fn greedy_coloring(g: &ConflictGraph) -> Coloring {
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    greedy_coloring_on(g, &all)
}

/// Color count of the greedy coloring; zero for a graph without vertices.
pub fn greedy_color(g: &ConflictGraph) -> usize {
    greedy_coloring(g).count
}

pub fn is_proper_coloring(g: &ConflictGraph, vertices: &[usize], colors: &[usize]) -> bool {
    let mut color_of = vec![None; g.vertex_count()];
    for (k, &v) in vertices.iter().enumerate() {
        color_of[v] = Some(colors[k]);
    }
    vertices
        .iter()
        .all(|&v| g.neighbors(v).iter().all(|&u| color_of[u].is_none() || color_of[u] != color_of[v]))
}

/// Per-slot spectrum summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotSpectrum {
    /// `B(t)`.
    pub freq_slots: usize,
    /// `max_n |N_n(t)|` over all stations.
    pub max_neighborhood: usize,
    /// Largest degree of the colored two-hop graph.
    pub max_conflict_degree: usize,
}

/// `B(t)` for one slot from each station's heard set.
///
/// The one-hop graph spans every station; the coloring runs on its square
/// restricted to the transmitting stations.
pub fn slot_spectrum(heard: &[Vec<usize>], transmitters: &[usize]) -> SlotSpectrum {
    let max_neighborhood = heard.iter().map(Vec::len).max().unwrap_or(0);
    if transmitters.is_empty() {
        return SlotSpectrum { freq_slots: 0, max_neighborhood, max_conflict_degree: 0 };
    }
    let square = two_hop_square(&build_one_hop_graph(heard));
    let coloring = greedy_coloring_on(&square, transmitters);
    SlotSpectrum { freq_slots: coloring.count, max_neighborhood, max_conflict_degree: coloring.max_degree }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn graph(n: usize, edges: &[(usize, usize)]) -> ConflictGraph {
        ConflictGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn rejects_self_loops() {
        assert!(ConflictGraph::from_edges(3, &[(1, 1)]).is_err());
        assert!(ConflictGraph::from_edges(3, &[(1, 5)]).is_err());
    }

    #[test]
    fn isolated_transmitters_have_no_edges() {
        let g = build_one_hop_graph(&[vec![], vec![], vec![]]);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn one_hop_is_symmetrized() {
        let g = build_one_hop_graph(&[vec![1], vec![], vec![0]]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn square_of_path_is_triangle() {
        let sq = two_hop_square(&graph(3, &[(0, 1), (1, 2)]));
        assert_eq!(sq, graph(3, &[(0, 1), (1, 2), (0, 2)]));
        assert_eq!(sq, oracle::bfs_square(&graph(3, &[(0, 1), (1, 2)])));
    }

    #[test]
    fn square_of_edgeless_is_edgeless() {
        assert_eq!(two_hop_square(&ConflictGraph::empty(5)).edge_count(), 0);
    }

    #[test]
    fn square_of_star_is_complete() {
        let k = 6;
        let star: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
        let sq = two_hop_square(&graph(k + 1, &star));
        assert_eq!(sq.edge_count(), (k + 1) * k / 2);
        assert_eq!(sq, oracle::bfs_square(&graph(k + 1, &star)));
    }

    #[test]
    fn coloring_small_cases() {
        assert_eq!(greedy_color(&ConflictGraph::empty(0)), 0);
        assert_eq!(greedy_color(&ConflictGraph::empty(4)), 1);
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(greedy_color(&tri), 3);
        assert_eq!(oracle::chromatic_number(&tri), 3);
    }

    #[test]
    fn greedy_order_is_degree_then_id() {
        // star center colored first, leaves share color 1
        let g = graph(4, &[(3, 0), (3, 1), (3, 2)]);
        let c = greedy_coloring(&g);
        assert_eq!(c.colors, vec![1, 1, 1, 0]);
        assert_eq!(c.count, 2);
    }

    #[test]
    fn induced_coloring_matches_explicit_subgraph() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]);
        let keep = [0, 2, 3, 5];
        let direct = greedy_coloring_on(&g, &keep);
        let sub = g.induced(&keep);
        let explicit = greedy_coloring(&sub);
        assert_eq!(direct.count, explicit.count);
        assert!(is_proper_coloring(&g, &keep, &direct.colors));
    }

    #[test]
    fn slot_spectrum_counts_receiver_conflicts() {
        // stations 0 and 2 transmit, 1 hears both: two colors needed
        let s = slot_spectrum(&[vec![], vec![0, 2], vec![]], &[0, 2]);
        assert_eq!(s.freq_slots, 2);
        assert_eq!(s.max_neighborhood, 2);
        let none = slot_spectrum(&[vec![], vec![]], &[]);
        assert_eq!(none.freq_slots, 0);
        let single = slot_spectrum(&[vec![], vec![0], vec![0]], &[0]);
        assert_eq!(single.freq_slots, 1);
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = graph(5, &[(0, 4), (1, 2)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(ConflictGraph::read_edge_list(buf.as_slice()).unwrap(), g);
        assert!(ConflictGraph::read_edge_list("0 1 2\n".as_bytes()).is_err());
    }
}
