use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::point::{ball_points, for_each_in_box, Point, MAX_DIM};
use crate::error::{Error, Result};

/// A vertex of a wired graph: either a site of the region or the sink.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Site(usize),
    Sink,
}

impl Node {
    #[inline]
    pub fn site(self) -> Option<usize> {
        match self {
            Node::Site(v) => Some(v),
            Node::Sink => None,
        }
    }
}

/// One oriented edge leaving a vertex.
///
/// For lattice graphs `label` is the lattice direction (`2a` for `+e_a`,
/// `2a+1` for `-e_a`), so parallel sink edges are told apart by the outside
/// neighbour they stand for. For abstract multigraphs it is the multiplicity
/// index among edges with the same head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub head: Node,
    pub label: u32,
}

/// Shape of a lattice region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Shape {
    /// `{x : |x|_2 <= radius}`.
    Ball { radius: u32 },
    /// Cube of the given side length, `[-(side-1)/2, side/2]^d` (integer division),
    /// so `side = 2N+1` gives `[-N, N]^d` and `side = 2` gives `{0,1}^d`.
    Box { side: u32 },
}

impl Shape {
    fn box_bounds(side: u32) -> (i32, i32) {
        let lo = -((side as i32 - 1) / 2);
        (lo, lo + side as i32 - 1)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            Shape::Ball { radius } => p.norm2() <= (radius as i64) * (radius as i64),
            Shape::Box { side } => {
                if side == 0 {
                    return false;
                }
                let (lo, hi) = Shape::box_bounds(side);
                p.coords().iter().all(|&x| lo <= x && x <= hi)
            }
        }
    }

    /// Sorted list of points in the shape.
    pub fn points(&self, dim: usize) -> Vec<Point> {
        match *self {
            Shape::Ball { radius } => ball_points(dim, radius),
            Shape::Box { side } => {
                let mut out = Vec::new();
                if side > 0 {
                    let (lo, hi) = Shape::box_bounds(side);
                    for_each_in_box(dim, &vec![lo; dim], &vec![hi; dim], |p| out.push(p));
                }
                out.sort();
                out
            }
        }
    }

    /// Radius of the largest origin-centred Euclidean ball inside the shape.
    pub fn inner_radius(&self) -> Option<u32> {
        match *self {
            Shape::Ball { radius } => Some(radius),
            Shape::Box { side } => {
                if side == 0 {
                    None
                } else {
                    let (lo, hi) = Shape::box_bounds(side);
                    Some(lo.unsigned_abs().min(hi as u32))
                }
            }
        }
    }
}

/// Serializable description of a lattice region and its anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub dimension: usize,
    pub shape: Shape,
    /// Radii `k` of the Euclidean anchor sets `D_1..D_k` in use (empty: none).
    #[serde(default)]
    pub anchor_radii: Vec<u32>,
}

impl RegionSpec {
    pub fn build(&self) -> Result<WiredGraph> {
        build_wired_region(self.dimension, self.shape)
    }
}

/// A finite wired multigraph `Λ ∪ {s}`.
///
/// Every site carries its ordered list of outgoing oriented edges; that order
/// is the edge ordering used by the burning bijections. Edge lists are
/// symmetric between sites. Sink edges have no stored reverse.
#[derive(Clone, Debug)]
pub struct WiredGraph {
    dim: usize,
    lattice: bool,
    sites: Vec<Point>,
    index: HashMap<Point, usize>,
    adj: Vec<Vec<Edge>>,
}

/// Build the wired graph of a lattice region of Z^d with canonical edge
/// ordering `+e_1, -e_1, ..., +e_d, -e_d`.
pub fn build_wired_region(dim: usize, shape: Shape) -> Result<WiredGraph> {
    check_dim(dim)?;
    WiredGraph::from_points(dim, &shape.points(dim))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "lattice dimension must be in 1..=6",
        });
    }
    Ok(())
}

impl WiredGraph {
    /// Wired graph of an arbitrary finite set of lattice points: each lattice
    /// edge leaving the set becomes an edge to the sink.
    pub fn from_points(dim: usize, points: &[Point]) -> Result<WiredGraph> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut sites: Vec<Point> = points.to_vec();
        sites.sort();
        sites.dedup();
        if let Some(p) = sites.iter().find(|p| p.dim() != dim) {
            return Err(Error::InvalidGraph(format!("point {p} is not in Z^{dim}")));
        }
        let index: HashMap<Point, usize> = sites.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let adj = sites
            .iter()
            .map(|p| {
                (0..2 * dim)
                    .map(|dir| {
                        let q = p.step(dir);
                        let head = index.get(&q).map_or(Node::Sink, |&j| Node::Site(j));
                        Edge { head, label: dir as u32 }
                    })
                    .collect()
            })
            .collect();
        Ok(WiredGraph { dim, lattice: true, sites, index, adj })
    }

    /// Wired graph with explicitly given sites and edge lists, used for
    /// auxiliary graphs whose degrees are not `2d`. Symmetry and sink
    /// reachability are validated.
    pub(crate) fn from_parts(dim: usize, lattice: bool, sites: Vec<Point>, adj: Vec<Vec<Edge>>) -> Result<WiredGraph> {
        if sites.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let index = sites.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let g = WiredGraph { dim, lattice, sites, index, adj };
        g.validate()?;
        Ok(g)
    }

    /// Abstract wired multigraph on `n` sites. `internal` lists undirected
    /// edges `(u, v, multiplicity)`, `sink` gives the number of sink edges per
    /// site. Each site's edges are ordered by head (sites ascending, sink
    /// last), then by multiplicity index.
    pub fn from_multigraph(n: usize, internal: &[(usize, usize, u32)], sink: &[u32]) -> Result<WiredGraph> {
        if n == 0 {
            return Err(Error::EmptyRegion);
        }
        if sink.len() != n {
            return Err(Error::InvalidGraph(format!("sink multiplicities for {} sites, expected {n}", sink.len())));
        }
        let mut mult = vec![std::collections::BTreeMap::<usize, u32>::new(); n];
        for &(u, v, m) in internal {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            *mult[u].entry(v).or_default() += m;
            *mult[v].entry(u).or_default() += m;
        }
        let adj = (0..n)
            .map(|u| {
                let mut edges = Vec::new();
                for (&v, &m) in &mult[u] {
                    edges.extend((0..m).map(|label| Edge { head: Node::Site(v), label }));
                }
                edges.extend((0..sink[u]).map(|label| Edge { head: Node::Sink, label }));
                edges
            })
            .collect();
        let sites: Vec<Point> = (0..n).map(|i| Point::new(&[i as i32]).expect("1-d point")).collect();
        let index = sites.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let g = WiredGraph { dim: 1, lattice: false, sites, index, adj };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        for (u, edges) in self.adj.iter().enumerate() {
            for e in edges {
                if let Node::Site(v) = e.head {
                    if v == u {
                        return Err(Error::InvalidGraph(format!("self-loop at site {u}")));
                    }
                    let forward = edges.iter().filter(|f| f.head == Node::Site(v)).count();
                    let back = self.adj[v].iter().filter(|f| f.head == Node::Site(u)).count();
                    if forward != back {
                        return Err(Error::InvalidGraph(format!("asymmetric edges between {u} and {v}")));
                    }
                }
            }
        }
        // every site must reach the sink
        let mut reached = vec![false; self.len()];
        let mut stack: Vec<usize> = (0..self.len())
            .filter(|&v| self.adj[v].iter().any(|e| e.head == Node::Sink))
            .collect();
        for &v in &stack {
            reached[v] = true;
        }
        while let Some(v) = stack.pop() {
            for e in &self.adj[v] {
                if let Node::Site(w) = e.head {
                    if !reached[w] {
                        reached[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        if let Some(v) = reached.iter().position(|r| !r) {
            return Err(Error::InvalidGraph(format!("site {v} has no path to the sink")));
        }
        Ok(())
    }

    /// Number of (non-sink) sites.
    #[inline]
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether sites are genuine lattice points and labels are directions.
    #[inline]
    pub fn is_lattice(&self) -> bool {
        self.lattice
    }

    #[inline]
    pub fn point(&self, v: usize) -> Point {
        self.sites[v]
    }

    pub fn points(&self) -> &[Point] {
        &self.sites
    }

    #[inline]
    pub fn site_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Outgoing oriented edges of `v` in the order `≺_v`.
    #[inline]
    pub fn edges(&self, v: usize) -> &[Edge] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Number of sink edges at `v`.
    pub fn sink_multiplicity(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|e| e.head == Node::Sink).count()
    }

    /// Number of undirected edges (sink edges included).
    pub fn edge_count(&self) -> usize {
        let internal: usize = self.adj.iter().flatten().filter(|e| e.head != Node::Sink).count();
        let sink: usize = (0..self.len()).map(|v| self.sink_multiplicity(v)).sum();
        internal / 2 + sink
    }

    /// Key used to index a site's arrow stack.
    #[inline]
    pub fn stack_key(&self, v: usize) -> u64 {
        if self.lattice {
            self.sites[v].key()
        } else {
            v as u64
        }
    }

    /// Index of the reverse oriented edge of `v`'s edge `i` at its head site.
    pub fn reverse_edge(&self, v: usize, i: usize) -> Option<(usize, usize)> {
        let e = self.adj[v][i];
        let w = e.head.site()?;
        // the m-th edge v->w pairs with the m-th edge w->v
        let m = self.adj[v][..i].iter().filter(|f| f.head == e.head).count();
        let j = self.adj[w]
            .iter()
            .enumerate()
            .filter(|(_, f)| f.head == Node::Site(v))
            .nth(m)
            .map(|(j, _)| j)?;
        Some((w, j))
    }

    /// Indicator vector of a set of points (points outside the graph ignored).
    pub fn indicator(&self, points: &[Point]) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        for p in points {
            if let Some(v) = self.site_of(p) {
                mark[v] = true;
            }
        }
        mark
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i32]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn single_vertex_in_one_dimension_has_two_sink_edges() {
        let g = build_wired_region(1, Shape::Box { side: 1 }).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.sink_multiplicity(0), 2);
        assert_eq!(g.edges(0)[0], Edge { head: Node::Sink, label: 0 });
        assert_eq!(g.edges(0)[1], Edge { head: Node::Sink, label: 1 });
    }

    #[test]
    fn adjacent_pair_in_the_plane() {
        let g = WiredGraph::from_points(2, &[pt(&[0, 0]), pt(&[1, 0])]).unwrap();
        for v in 0..2 {
            assert_eq!(g.degree(v), 4);
            assert_eq!(g.sink_multiplicity(v), 3);
        }
        assert_eq!(g.edges(0)[0].head, Node::Site(1));
        assert_eq!(g.edges(1)[1].head, Node::Site(0));
    }

    #[test]
    fn two_by_two_box() {
        let g = build_wired_region(2, Shape::Box { side: 2 }).unwrap();
        assert_eq!(g.len(), 4);
        for v in 0..4 {
            assert_eq!(g.degree(v), 4);
            assert_eq!(g.sink_multiplicity(v), 2);
        }
        assert_eq!(g.edge_count(), 4 + 8);
    }

    #[test]
    fn degree_identity_on_balls_and_boxes() {
        for dim in 1..=4 {
            for shape in [Shape::Ball { radius: 3 }, Shape::Box { side: 4 }] {
                let g = build_wired_region(dim, shape).unwrap();
                for v in 0..g.len() {
                    let internal = g.edges(v).iter().filter(|e| e.head != Node::Sink).count();
                    assert_eq!(internal + g.sink_multiplicity(v), 2 * dim);
                    for (i, e) in g.edges(v).iter().enumerate() {
                        assert_eq!(e.label as usize, i);
                        if let Some((w, j)) = g.reverse_edge(v, i) {
                            assert_eq!(g.edges(w)[j].head, Node::Site(v));
                            assert_eq!(g.edges(w)[j].label as usize, i ^ 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_region_is_rejected() {
        assert_eq!(build_wired_region(2, Shape::Box { side: 0 }).unwrap_err(), Error::EmptyRegion);
        assert!(matches!(
            build_wired_region(0, Shape::Ball { radius: 1 }),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn box_bounds() {
        assert!(Shape::Box { side: 3 }.contains(&pt(&[-1, 1])));
        assert!(!Shape::Box { side: 2 }.contains(&pt(&[-1, 0])));
        assert!(Shape::Box { side: 2 }.contains(&pt(&[1, 1])));
        assert_eq!(Shape::Box { side: 5 }.inner_radius(), Some(2));
        assert_eq!(Shape::Box { side: 2 }.inner_radius(), Some(0));
    }

    #[test]
    fn multigraph_ordering_and_validation() {
        let g = WiredGraph::from_multigraph(2, &[(0, 1, 2)], &[1, 0]).unwrap();
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.edges(0)[2].head, Node::Sink);
        assert_eq!(g.reverse_edge(0, 1), Some((1, 1)));
        assert!(WiredGraph::from_multigraph(2, &[(0, 1, 1)], &[0, 0]).is_err());
        assert!(WiredGraph::from_multigraph(1, &[(0, 0, 1)], &[1]).is_err());
    }

    #[test]
    fn region_spec_json() {
        let spec = RegionSpec { dimension: 2, shape: Shape::Ball { radius: 5 }, anchor_radii: vec![1, 2] };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"dimension":2,"shape":{"kind":"ball","radius":5},"anchor_radii":[1,2]}"#);
        let back: RegionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap().len(), 81);
    }
}
