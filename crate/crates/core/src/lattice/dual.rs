use std::collections::HashMap;

use super::anchor::is_simply_connected;
use super::graph::WiredGraph;
use super::point::Point;
use crate::error::{Error, Result};
use crate::tree::OrientedTree;

/// A primal lattice edge from `base` to `base + e_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimalEdge {
    pub base: Point,
    pub axis: u8,
}

/// Planar dual of a wired Z² region.
///
/// Dual vertices are the unit plaquettes touching the region, named by their
/// lower-left corner `p` (the dual point is `p + (1/2, 1/2)`). The sink of
/// the primal graph is the unbounded face of the dual. Dual edge `i` crosses
/// primal edge `primal[i]`.
#[derive(Clone, Debug)]
pub struct DualRegion {
    plaquettes: Vec<Point>,
    index: HashMap<Point, usize>,
    primal: Vec<PrimalEdge>,
    ends: Vec<(usize, usize)>,
    by_primal: HashMap<PrimalEdge, usize>,
}

/// A set of dual edges, by index into the region's edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualTree {
    pub edges: Vec<usize>,
}

impl DualRegion {
    pub fn new(g: &WiredGraph) -> Result<DualRegion> {
        if !g.is_lattice() || g.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: g.dim(),
                reason: "planar duality needs a region of Z^2",
            });
        }
        if (0..g.len()).any(|v| g.degree(v) != 4) {
            return Err(Error::InvalidGraph("dual needs every lattice edge at the region".into()));
        }
        if !is_simply_connected(g.points()) {
            return Err(Error::InvalidGraph("dual needs a simply connected region".into()));
        }
        let mut primal: Vec<PrimalEdge> = (0..g.len())
            .flat_map(|v| (0..4).map(move |dir| (v, dir)))
            .map(|(v, dir)| normalise(g.point(v), dir))
            .collect();
        primal.sort();
        primal.dedup();

        let mut plaquettes: Vec<Point> = primal.iter().flat_map(faces).collect();
        plaquettes.sort();
        plaquettes.dedup();
        let index: HashMap<Point, usize> = plaquettes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let ends = primal
            .iter()
            .map(|e| {
                let [a, b] = faces(e);
                (index[&a], index[&b])
            })
            .collect();
        let by_primal = primal.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(DualRegion { plaquettes, index, primal, ends, by_primal })
    }

    pub fn vertex_count(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.primal.len()
    }

    pub fn plaquette(&self, i: usize) -> Point {
        self.plaquettes[i]
    }

    pub fn plaquette_index(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// The two dual vertices joined by dual edge `i`.
    pub fn ends(&self, i: usize) -> (usize, usize) {
        self.ends[i]
    }

    /// The primal edge crossed by dual edge `i`.
    pub fn primal_of(&self, i: usize) -> PrimalEdge {
        self.primal[i]
    }

    /// The dual edge crossing a primal edge.
    pub fn dual_of(&self, e: &PrimalEdge) -> Option<usize> {
        self.by_primal.get(e).copied()
    }

    /// Complement of a dual edge set.
    pub fn complement(&self, edges: &[usize]) -> Vec<usize> {
        let mut mark = vec![false; self.edge_count()];
        for &e in edges {
            mark[e] = true;
        }
        (0..self.edge_count()).filter(|&e| !mark[e]).collect()
    }

    /// Whether `edges` form a spanning tree of the dual graph.
    pub fn is_spanning_tree(&self, edges: &[usize]) -> bool {
        if edges.len() + 1 != self.vertex_count() {
            return false;
        }
        let mut uf = UnionFind::new(self.vertex_count());
        edges.iter().all(|&e| {
            let (a, b) = self.ends[e];
            uf.union(a, b)
        })
    }
}

/// Dual edges of the primal edges not in `t`; checked to be a spanning tree
/// of the dual.
pub fn dual_tree(region: &DualRegion, g: &WiredGraph, t: &OrientedTree) -> Result<DualTree> {
    let tree_edges: Vec<usize> = t
        .lattice_edges(g)
        .into_iter()
        .map(|(p, label)| {
            let e = PrimalEdge { base: p, axis: (label / 2) as u8 };
            region
                .dual_of(&e)
                .ok_or_else(|| Error::InvalidTree(format!("tree edge at {p} is not in the region")))
        })
        .collect::<Result<_>>()?;
    let edges = region.complement(&tree_edges);
    if !region.is_spanning_tree(&edges) {
        return Err(Error::Internal("complement of a primal spanning tree is not a dual spanning tree".into()));
    }
    Ok(DualTree { edges })
}

fn normalise(p: Point, dir: usize) -> PrimalEdge {
    let axis = (dir / 2) as u8;
    if dir % 2 == 0 {
        PrimalEdge { base: p, axis }
    } else {
        PrimalEdge { base: p.step(dir), axis }
    }
}

/// Lower-left corners of the two plaquettes on either side of `e`.
fn faces(e: &PrimalEdge) -> [Point; 2] {
    let other = if e.axis == 0 { 1 } else { 0 };
    [e.base, e.base.offset(other, -1)]
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
