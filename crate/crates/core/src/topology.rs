//! Node placements in the unit square and the recursive cell hierarchy.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// `N` node positions drawn independently and uniformly from the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePlacement {
    positions: Vec<Point>,
    seed: u64,
}

impl NodePlacement {
    /// Builds a placement from explicit coordinates. Coordinates must lie in
    /// `[0, 1]` and be pairwise distinct.
    pub fn from_positions(positions: Vec<Point>) -> Result<Self> {
        if positions.len() < 2 {
            return invalid("a placement needs at least 2 nodes");
        }
        for (i, p) in positions.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y) {
                return invalid(format!("node {i} at ({}, {}) is outside the unit square", p.x, p.y));
            }
        }
        let mut sorted: Vec<(f64, f64)> = positions.iter().map(|p| (p.x, p.y)).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("coordinates are finite"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("placement contains coincident nodes");
        }
        Ok(Self { positions, seed: 0 })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, n: usize) -> Point {
        self.positions[n]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.positions[a].distance(&self.positions[b])
    }

    /// Writes `node_id,x,y` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (node_id, p) in self.positions.iter().enumerate() {
            w.serialize(PlacementRow { node_id, x: p.x, y: p.y })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rows: Vec<PlacementRow> = csv::Reader::from_reader(reader)
            .deserialize()
            .collect::<std::result::Result<_, _>>()?;
        rows.sort_by_key(|r| r.node_id);
        if rows.iter().enumerate().any(|(i, r)| r.node_id != i) {
            return invalid("node ids must be 0..N without gaps");
        }
        Self::from_positions(rows.into_iter().map(|r| Point::new(r.x, r.y)).collect())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct PlacementRow {
    node_id: usize,
    x: f64,
    y: f64,
}

/// Draws `n_nodes` uniform positions from a ChaCha stream seeded with `seed`.
/// A node landing exactly on an earlier node is redrawn.
pub fn place_nodes(n_nodes: usize, seed: u64) -> Result<NodePlacement> {
    if n_nodes < 2 {
        return invalid(format!("n_nodes must be at least 2, got {n_nodes}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<Point> = Vec::with_capacity(n_nodes);
    let mut seen = std::collections::HashSet::with_capacity(n_nodes);
    while positions.len() < n_nodes {
        let p = Point::new(rng.gen::<f64>(), rng.gen::<f64>());
        if seen.insert((p.x.to_bits(), p.y.to_bits())) {
            positions.push(p);
        }
    }
    Ok(NodePlacement { positions, seed })
}

/// Connectivity radius `sqrt(c ln N / N)` used by both gossip schemes.
pub fn gossip_radius(n_nodes: usize, c: f64) -> f64 {
    let n = n_nodes as f64;
    (c * n.ln() / n).sqrt()
}

/// Whether the geometric graph joining nodes within `radius` is connected.
pub fn is_connected(placement: &NodePlacement, radius: f64) -> bool {
    let n = placement.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(a) = stack.pop() {
        for b in 0..n {
            if !seen[b] && placement.distance(a, b) <= radius {
                seen[b] = true;
                reached += 1;
                stack.push(b);
            }
        }
    }
    reached == n
}

/// Region used for occupancy counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `[x0, x1) x [y0, y1)`; an upper edge at 1.0 is closed.
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disc { center: Point, radius: f64 },
}

impl Region {
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        if !(inside(x0) && inside(x1) && inside(y0) && inside(y1)) || x1 <= x0 || y1 <= y0 {
            return invalid(format!("rectangle [{x0},{x1})x[{y0},{y1}) is empty or leaves the unit square"));
        }
        Ok(Region::Rect { x0, y0, x1, y1 })
    }

    pub fn disc(center: Point, radius: f64) -> Result<Self> {
        let fits = radius > 0.0
            && center.x - radius >= 0.0
            && center.x + radius <= 1.0
            && center.y - radius >= 0.0
            && center.y + radius <= 1.0;
        if !fits {
            return invalid("disc must have positive radius and lie inside the unit square");
        }
        Ok(Region::Disc { center, radius })
    }

    pub fn unit_square() -> Self {
        Region::Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Rect { x0, y0, x1, y1 } => (x1 - x0) * (y1 - y0),
            Region::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            Region::Rect { x0, y0, x1, y1 } => {
                let in_axis = |v: f64, lo: f64, hi: f64| v >= lo && (v < hi || (hi == 1.0 && v <= 1.0));
                in_axis(p.x, x0, x1) && in_axis(p.y, y0, y1)
            }
            Region::Disc { center, radius } => center.distance(p) <= radius,
        }
    }
}

pub fn count_in_region(placement: &NodePlacement, region: &Region) -> usize {
    placement.positions().iter().filter(|p| region.contains(p)).count()
}

pub fn nearest_neighbor_distance(placement: &NodePlacement, n: usize) -> f64 {
    (0..placement.len())
        .filter(|&m| m != n)
        .map(|m| placement.distance(n, m))
        .fold(f64::INFINITY, f64::min)
}

/// Number of hierarchy levels `ceil(log4(N^(1 - kappa)))`, at least 1.
pub fn hierarchy_levels(n_nodes: usize, kappa: f64) -> u32 {
    let exponent = (1.0 - kappa) * (n_nodes as f64).ln() / 4f64.ln();
    // Shave rounding noise so exact powers of four do not gain a level.
    (exponent - 1e-9).ceil().max(1.0) as u32
}

/// Recursive 4-ary partition of the unit square.
///
/// Level `t` (1-based, `1 <= t <= T`) is a `2^(T-t) x 2^(T-t)` grid of
/// half-open cells of side `2^(t-T)`; cell `row * side + col` covers
/// `[col*s, (col+1)*s) x [row*s, (row+1)*s)`. Level `T` is a single cell.
/// Empty cells are kept.
#[derive(Debug, Clone)]
pub struct HierarchyPartition {
    levels: u32,
    kappa: f64,
    cells: Vec<Vec<Vec<usize>>>,
    membership: Vec<Vec<usize>>,
}

pub fn build_hierarchy(placement: &NodePlacement, kappa: f64) -> Result<HierarchyPartition> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return invalid(format!("kappa must lie in (0, 1), got {kappa}"));
    }
    Ok(build_hierarchy_with_levels(placement, hierarchy_levels(placement.len(), kappa), kappa))
}

/// Same partition with an explicit level count.
pub fn build_hierarchy_with_levels(placement: &NodePlacement, levels: u32, kappa: f64) -> HierarchyPartition {
    let levels = levels.max(1);
    let mut cells = Vec::with_capacity(levels as usize);
    let mut membership = Vec::with_capacity(levels as usize);
    for t in 1..=levels {
        let side = 1usize << (levels - t);
        let mut level_cells = vec![Vec::new(); side * side];
        let mut level_members = Vec::with_capacity(placement.len());
        for (n, p) in placement.positions().iter().enumerate() {
            let idx = grid_index(p.y, side) * side + grid_index(p.x, side);
            level_cells[idx].push(n);
            level_members.push(idx);
        }
        cells.push(level_cells);
        membership.push(level_members);
    }
    HierarchyPartition { levels, kappa, cells, membership }
}

fn grid_index(v: f64, side: usize) -> usize {
    // side is a power of two, so the scaling is exact
    ((v * side as f64).floor() as usize).min(side - 1)
}

impl HierarchyPartition {
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Cells per grid side at level `t`.
    pub fn side(&self, t: u32) -> usize {
        1usize << (self.levels - t)
    }

    pub fn cell_side(&self, t: u32) -> f64 {
        2f64.powi(t as i32 - self.levels as i32)
    }

    /// Largest possible distance between two nodes of one level-`t` cell.
    pub fn max_diameter(&self, t: u32) -> f64 {
        std::f64::consts::SQRT_2 * self.cell_side(t)
    }

    pub fn cells(&self, t: u32) -> &[Vec<usize>] {
        &self.cells[(t - 1) as usize]
    }

    pub fn cell(&self, t: u32, idx: usize) -> &[usize] {
        &self.cells[(t - 1) as usize][idx]
    }

    /// Index of the level-`t` cell holding node `n`.
    pub fn cell_of(&self, n: usize, t: u32) -> usize {
        self.membership[(t - 1) as usize][n]
    }

    /// The four level-`(t-1)` cells making up level-`t` cell `idx`.
    pub fn children(&self, t: u32, idx: usize) -> [usize; 4] {
        assert!(t >= 2, "level-1 cells have no children");
        let side = self.side(t);
        let (row, col) = (idx / side, idx % side);
        let child_side = 2 * side;
        let at = |r: usize, c: usize| r * child_side + c;
        [
            at(2 * row, 2 * col),
            at(2 * row, 2 * col + 1),
            at(2 * row + 1, 2 * col),
            at(2 * row + 1, 2 * col + 1),
        ]
    }

    /// Level-`(t+1)` cell containing level-`t` cell `idx`.
    pub fn parent(&self, t: u32, idx: usize) -> usize {
        let side = self.side(t);
        let (row, col) = (idx / side, idx % side);
        (row / 2) * (side / 2) + col / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_nodes_distinct_in_square() {
        let p = place_nodes(2, 9).unwrap();
        assert_eq!(p.len(), 2);
        assert_ne!(p.position(0), p.position(1));
        for q in p.positions() {
            assert!((0.0..=1.0).contains(&q.x) && (0.0..=1.0).contains(&q.y));
        }
    }

    #[test]
    fn placement_is_deterministic() {
        assert_eq!(place_nodes(1000, 42).unwrap(), place_nodes(1000, 42).unwrap());
        assert_ne!(place_nodes(1000, 42).unwrap(), place_nodes(1000, 43).unwrap());
    }

    #[test]
    fn rejects_single_node() {
        assert!(place_nodes(1, 0).is_err());
        assert!(place_nodes(0, 0).is_err());
    }

    #[test]
    fn from_positions_rejects_collisions_and_outside() {
        let dup = vec![Point::new(0.2, 0.2), Point::new(0.2, 0.2)];
        assert!(NodePlacement::from_positions(dup).is_err());
        let out = vec![Point::new(0.2, 0.2), Point::new(1.2, 0.2)];
        assert!(NodePlacement::from_positions(out).is_err());
    }

    #[test]
    fn left_half_fraction_concentrates() {
        // Binomial(1000, 1/2): P(|X/1000 - 0.5| > 0.05) is about 1.6e-3.
        let left = Region::rect(0.0, 0.0, 0.5, 1.0).unwrap();
        let good = (0..500)
            .filter(|&s| {
                let frac = count_in_region(&place_nodes(1000, s).unwrap(), &left) as f64 / 1000.0;
                (0.45..=0.55).contains(&frac)
            })
            .count();
        assert!(good as f64 >= 0.95 * 500.0, "{good}/500");
    }

    #[test]
    fn whole_square_counts_everything() {
        let p = place_nodes(300, 1).unwrap();
        assert_eq!(count_in_region(&p, &Region::unit_square()), 300);
        let corner = NodePlacement::from_positions(vec![Point::new(1.0, 1.0), Point::new(0.0, 0.0)]).unwrap();
        assert_eq!(count_in_region(&corner, &Region::unit_square()), 2);
    }

    #[test]
    fn quarter_region_lemma_check() {
        let region = Region::rect(0.25, 0.25, 0.75, 0.75).unwrap();
        assert_relative_eq!(region.area(), 0.25);
        let good = (0..200)
            .filter(|&s| {
                let c = count_in_region(&place_nodes(1000, 1000 + s).unwrap(), &region) as f64;
                (0.7 * 250.0..=1.3 * 250.0).contains(&c)
            })
            .count();
        assert!(good >= 190, "{good}/200");
    }

    #[test]
    fn thin_region_is_almost_always_empty() {
        let thin = Region::rect(0.3, 0.3, 0.3 + 1e-3, 0.3 + 1e-3).unwrap();
        let hits: usize = (0..200).map(|s| count_in_region(&place_nodes(100, s).unwrap(), &thin)).sum();
        // expected total 200 * 100 * 1e-6 = 0.02
        assert!(hits <= 2, "{hits}");
    }

    #[test]
    fn region_validation() {
        assert!(Region::rect(0.5, 0.0, 0.5, 1.0).is_err());
        assert!(Region::rect(0.0, 0.0, 1.5, 1.0).is_err());
        assert!(Region::disc(Point::new(0.1, 0.5), 0.2).is_err());
        let d = Region::disc(Point::new(0.5, 0.5), 0.25).unwrap();
        assert!(d.contains(&Point::new(0.75, 0.5)));
        assert!(!d.contains(&Point::new(0.76, 0.5)));
    }

    #[test]
    fn nearest_neighbor_three_four_five() {
        let p = NodePlacement::from_positions(vec![Point::new(0.0, 0.0), Point::new(0.3, 0.4)]).unwrap();
        assert_relative_eq!(nearest_neighbor_distance(&p, 0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(nearest_neighbor_distance(&p, 1), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mutual_nearest_neighbors_agree() {
        let p = place_nodes(200, 5).unwrap();
        for n in 0..p.len() {
            let d = nearest_neighbor_distance(&p, n);
            let m = (0..p.len()).find(|&m| m != n && p.distance(n, m) == d).unwrap();
            if nearest_neighbor_distance(&p, m) == p.distance(m, n) {
                assert_eq!(nearest_neighbor_distance(&p, m), d);
            }
            assert!(d > 0.0);
        }
    }

    #[test]
    fn nearest_neighbor_scale() {
        let scale = 1000f64.powf(-0.5);
        for s in 0..50 {
            let p = place_nodes(1000, s).unwrap();
            let mut d: Vec<f64> = (0..p.len()).map(|n| nearest_neighbor_distance(&p, n)).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = d[d.len() / 2];
            assert!((0.3 * scale..=3.0 * scale).contains(&median), "seed {s}: {median}");
        }
    }

    #[test]
    fn levels_for_powers_of_four() {
        assert_eq!(hierarchy_levels(256, 1e-4), 4);
        assert_eq!(hierarchy_levels(256, 1e-12), 4);
        assert_eq!(hierarchy_levels(1024, 1e-4), 5);
        assert_eq!(hierarchy_levels(16, 1e-4), 2);
        assert_eq!(hierarchy_levels(4, 1e-4), 1);
        assert_eq!(hierarchy_levels(2, 1e-4), 1);
        assert_eq!(hierarchy_levels(10, 1e-4), 2);
    }

    #[test]
    fn hierarchy_shape_n256() {
        let p = place_nodes(256, 3).unwrap();
        let h = build_hierarchy(&p, 1e-9).unwrap();
        assert_eq!(h.levels(), 4);
        assert_eq!(h.cells(1).len(), 64);
        assert_eq!(h.side(1), 8);
        assert_relative_eq!(h.cell_side(1), 0.125);
        assert_eq!(h.cells(4).len(), 1);
        assert_eq!(h.cell(4, 0).len(), 256);
        assert_relative_eq!(h.max_diameter(4), std::f64::consts::SQRT_2);
    }

    #[test]
    fn hierarchy_rejects_bad_kappa() {
        let p = place_nodes(16, 3).unwrap();
        assert!(build_hierarchy(&p, 0.0).is_err());
        assert!(build_hierarchy(&p, 1.0).is_err());
        assert!(build_hierarchy(&p, f64::NAN).is_err());
    }

    #[test]
    fn hierarchy_partition_nesting_and_diameter() {
        for seed in 0..20 {
            let p = place_nodes(1024, seed).unwrap();
            let h = build_hierarchy(&p, 1e-4).unwrap();
            for t in 1..=h.levels() {
                let total: usize = h.cells(t).iter().map(Vec::len).sum();
                assert_eq!(total, p.len());
                let mut seen = vec![false; p.len()];
                for (idx, cell) in h.cells(t).iter().enumerate() {
                    for &n in cell {
                        assert!(!seen[n]);
                        seen[n] = true;
                        assert_eq!(h.cell_of(n, t), idx);
                        if t < h.levels() {
                            let parent = h.parent(t, idx);
                            assert!(h.cell(t + 1, parent).contains(&n));
                        }
                    }
                    for (i, &a) in cell.iter().enumerate() {
                        for &b in &cell[i + 1..] {
                            assert!(p.distance(a, b) <= h.max_diameter(t));
                        }
                    }
                }
                if t >= 2 {
                    for idx in 0..h.cells(t).len() {
                        let mut union: Vec<usize> =
                            h.children(t, idx).iter().flat_map(|&c| h.cell(t - 1, c).iter().copied()).collect();
                        union.sort_unstable();
                        let mut own = h.cell(t, idx).to_vec();
                        own.sort_unstable();
                        assert_eq!(union, own);
                        for c in h.children(t, idx) {
                            assert_eq!(h.parent(t - 1, c), idx);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_points_land_in_last_cell() {
        let p = NodePlacement::from_positions(vec![Point::new(1.0, 1.0), Point::new(0.0, 0.0), Point::new(0.5, 0.5)])
            .unwrap();
        let h = build_hierarchy_with_levels(&p, 2, 0.5);
        assert_eq!(h.cell_of(0, 1), 3);
        assert_eq!(h.cell_of(1, 1), 0);
        assert_eq!(h.cell_of(2, 1), 3);
    }

    #[test]
    fn gossip_radius_values() {
        assert_relative_eq!(gossip_radius(8, 2.0), (2.0 * 8f64.ln() / 8.0).sqrt());
        assert_relative_eq!(gossip_radius(8, 2.0), 0.7211, epsilon = 1e-4);
        let mut prev = gossip_radius(8, 2.0);
        for n in 9..5000 {
            let r = gossip_radius(n, 2.0);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn gossip_radius_connects_n1000() {
        let r = gossip_radius(1000, 2.0);
        let connected = (0..200).filter(|&s| is_connected(&place_nodes(1000, s).unwrap(), r)).count();
        assert!(connected >= 190, "{connected}/200");
    }

    #[test]
    fn csv_roundtrip() {
        let p = place_nodes(17, 4).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_id,x,y\n"));
        let back = NodePlacement::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.positions(), p.positions());
    }
}
