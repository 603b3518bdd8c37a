use std::collections::HashSet;

use super::anchored::{inverse_with_levels, Levels};
use crate::error::{Error, Result};
use crate::lattice::{is_simply_connected, Anchor, Edge, Node, Point, WiredGraph};
use crate::sandpile::SandpileConfig;
use crate::tree::OrientedTree;

/// The graph `G*_{W,k}` on `W ∪ {s}`: all edges induced by `W`, plus one sink
/// edge for every ambient edge from `D_k` to the outside of `W`. Sites of
/// `W \ D_k` lose their edges to the outside.
#[derive(Clone, Debug)]
pub struct AuxGraph {
    pub graph: WiredGraph,
    /// Anchor index `k`.
    pub k: usize,
    /// Ambient edge index (lattice direction for windows of Z^d) of every
    /// auxiliary edge.
    ambient_edge: Vec<Vec<usize>>,
}

impl AuxGraph {
    /// `G*_{W,k}` inside an ambient wired graph; `w` marks the sites of `W`.
    pub fn build(g: &WiredGraph, w: &[bool], anchor: &Anchor, k: usize) -> Result<AuxGraph> {
        if w.len() != g.len() {
            return Err(Error::ConfigLength { expected: g.len(), got: w.len() });
        }
        check_k(anchor, k)?;
        for p in anchor.set(k) {
            match g.site_of(p) {
                Some(v) if w[v] => {}
                _ => return Err(Error::Precondition(format!("D_{k} is not contained in W (missing {p})"))),
            }
        }
        let members: Vec<usize> = (0..g.len()).filter(|&v| w[v]).collect();
        let points: Vec<Point> = members.iter().map(|&v| g.point(v)).collect();
        if g.is_lattice() && !is_simply_connected(&points) {
            return Err(Error::Precondition("W is not simply connected".into()));
        }
        let mut local = vec![usize::MAX; g.len()];
        for (i, &v) in members.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = Vec::with_capacity(members.len());
        let mut ambient_edge = Vec::with_capacity(members.len());
        for &v in &members {
            let in_core = anchor.level(&g.point(v)).is_some_and(|l| l <= k);
            let mut edges = Vec::new();
            let mut ids = Vec::new();
            for (i, e) in g.edges(v).iter().enumerate() {
                let head = match e.head {
                    Node::Site(u) if w[u] => Node::Site(local[u]),
                    _ if in_core => Node::Sink,
                    _ => continue,
                };
                edges.push(Edge { head, label: e.label });
                ids.push(i);
            }
            adj.push(edges);
            ambient_edge.push(ids);
        }
        let graph = WiredGraph::from_parts(g.dim(), g.is_lattice(), points, adj)?;
        Ok(AuxGraph { graph, k, ambient_edge })
    }

    /// `G*_{W,k}` for a finite `W ⊂ Z^d` with `Z^d` itself as the ambient
    /// graph. `W` must contain `D_k`; the caller guarantees that `W` is simply
    /// connected (descendant sets of a wired tree always are).
    pub fn lattice_window(dim: usize, w: &[Point], anchor: &Anchor, k: usize) -> Result<AuxGraph> {
        check_k(anchor, k)?;
        let mut points = w.to_vec();
        points.sort();
        points.dedup();
        let members: HashSet<Point> = points.iter().copied().collect();
        if let Some(p) = anchor.set(k).iter().find(|p| !members.contains(p)) {
            return Err(Error::Precondition(format!("D_{k} is not contained in W (missing {p})")));
        }
        let local = |p: &Point| points.binary_search(p).ok();
        let mut adj = Vec::with_capacity(points.len());
        let mut ambient_edge = Vec::with_capacity(points.len());
        for p in &points {
            let in_core = anchor.level(p).is_some_and(|l| l <= k);
            let mut edges = Vec::new();
            let mut ids = Vec::new();
            for dir in 0..2 * dim {
                let head = match local(&p.step(dir)) {
                    Some(u) => Node::Site(u),
                    None if in_core => Node::Sink,
                    None => continue,
                };
                edges.push(Edge { head, label: dir as u32 });
                ids.push(dir);
            }
            adj.push(edges);
            ambient_edge.push(ids);
        }
        let graph = WiredGraph::from_parts(dim, true, points, adj)?;
        Ok(AuxGraph { graph, k, ambient_edge })
    }

    /// `t_{W,k}`: restriction of an ambient tree to the auxiliary edges.
    /// Fails if some arrow of `W` uses a dropped edge, i.e. `W` is not the
    /// descendant set of `D_k` in `t`.
    pub fn restrict_tree(&self, g: &WiredGraph, t: &OrientedTree) -> Result<OrientedTree> {
        self.tree_from_ambient(|p| {
            let v = g.site_of(p).expect("aux sites come from the ambient graph");
            t.parent_edge(v)
        })
    }

    /// Tree on the auxiliary graph given each site's ambient arrow (an edge
    /// index of the ambient graph, or a lattice direction for windows).
    pub fn tree_from_ambient(&self, mut ambient_arrow: impl FnMut(&Point) -> usize) -> Result<OrientedTree> {
        let parent = (0..self.graph.len())
            .map(|a| {
                let p = self.graph.point(a);
                let e = ambient_arrow(&p);
                self.ambient_edge[a].iter().position(|&i| i == e).ok_or_else(|| {
                    Error::Precondition(format!("arrow of {p} leaves W outside D_{}", self.k))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        OrientedTree::new(&self.graph, parent)
    }

    /// Ambient edge index of auxiliary edge `i` at site `a`.
    pub fn ambient_edge(&self, a: usize, i: usize) -> usize {
        self.ambient_edge[a][i]
    }
}

fn check_k(anchor: &Anchor, k: usize) -> Result<()> {
    if k == 0 || k > anchor.depth() {
        return Err(Error::Precondition(format!("anchor index {k} outside 1..={}", anchor.depth())));
    }
    Ok(())
}

/// `ψ_{W,k}`: the anchored inverse on `G*_{W,k}` with the anchor cut at `D_k`.
pub fn psi_window(aux: &AuxGraph, t: &OrientedTree, anchor: &Anchor) -> Result<SandpileConfig> {
    let cut = anchor.truncated(aux.k)?;
    let levels = Levels::new(&aux.graph, Some(&cut));
    inverse_with_levels(&aux.graph, t, &levels)
}

/// The anchored schedule of `ψ_{W,k}(t)` on `G*_{W,k}`.
pub fn window_schedule(aux: &AuxGraph, t: &OrientedTree, anchor: &Anchor) -> Result<super::PhaseSchedule> {
    let cut = anchor.truncated(aux.k)?;
    super::tree_schedule(&aux.graph, t, &cut)
}
