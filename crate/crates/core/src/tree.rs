//! Spanning trees of wired graphs, stored as one parent arrow per site and
//! oriented toward the sink.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Node, Point, WiredGraph};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedTree {
    /// Index into `g.edges(v)` of the arrow leaving `v`.
    parent: Vec<u32>,
}

/// One JSON record of a serialized tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub site: Point,
    /// `None` when the arrow points to the sink.
    pub parent: Option<Point>,
    /// Rank of the arrow in the site's edge ordering.
    pub edge: usize,
    /// Lattice direction (or multiplicity index) of the arrow.
    pub label: u32,
}

impl OrientedTree {
    /// Validates that the arrows form a spanning tree oriented to the sink.
    pub fn new(g: &WiredGraph, parent_edges: Vec<usize>) -> Result<OrientedTree> {
        let t = OrientedTree::from_edges_unchecked(parent_edges);
        t.validate(g)?;
        Ok(t)
    }

    pub(crate) fn from_edges_unchecked(parent_edges: Vec<usize>) -> OrientedTree {
        OrientedTree {
            parent: parent_edges.into_iter().map(|e| e as u32).collect(),
        }
    }

    pub fn validate(&self, g: &WiredGraph) -> Result<()> {
        if self.parent.len() != g.len() {
            return Err(Error::InvalidTree(format!(
                "{} arrows for {} sites",
                self.parent.len(),
                g.len()
            )));
        }
        for (v, &e) in self.parent.iter().enumerate() {
            if e as usize >= g.degree(v) {
                return Err(Error::InvalidTree(format!("site {v} has no edge {e}")));
            }
        }
        // 0 = unvisited, 1 = on current path, 2 = reaches sink
        let mut state = vec![0u8; g.len()];
        let mut path = Vec::new();
        for start in 0..g.len() {
            let mut v = start;
            loop {
                match state[v] {
                    2 => break,
                    1 => return Err(Error::InvalidTree(format!("directed cycle through site {v}"))),
                    _ => {}
                }
                state[v] = 1;
                path.push(v);
                match self.parent(g, v) {
                    Node::Sink => break,
                    Node::Site(w) => v = w,
                }
            }
            for u in path.drain(..) {
                state[u] = 2;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn parent_edge(&self, v: usize) -> usize {
        self.parent[v] as usize
    }

    pub fn parent_edges(&self) -> Vec<usize> {
        self.parent.iter().map(|&e| e as usize).collect()
    }

    #[inline]
    pub fn parent(&self, g: &WiredGraph, v: usize) -> Node {
        g.edges(v)[self.parent[v] as usize].head
    }

    /// Sites in an order where every site comes after its parent.
    pub fn order_from_sink(&self, g: &WiredGraph) -> Vec<usize> {
        let children = self.children(g);
        let mut order: Vec<usize> = (0..g.len()).filter(|&v| self.parent(g, v) == Node::Sink).collect();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            order.extend_from_slice(&children[v]);
            i += 1;
        }
        order
    }

    pub fn children(&self, g: &WiredGraph) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); g.len()];
        for v in 0..g.len() {
            if let Node::Site(w) = self.parent(g, v) {
                ch[w].push(v);
            }
        }
        ch
    }

    /// Graph distance to the sink in the tree.
    pub fn depths(&self, g: &WiredGraph) -> Vec<usize> {
        let mut depth = vec![0usize; g.len()];
        for v in self.order_from_sink(g) {
            depth[v] = match self.parent(g, v) {
                Node::Sink => 1,
                Node::Site(w) => depth[w] + 1,
            };
        }
        depth
    }

    /// `desc_t(D)`: sites whose arrow path to the sink meets `D`.
    pub fn descendants(&self, g: &WiredGraph, in_set: &[bool]) -> Vec<bool> {
        let mut desc = vec![false; g.len()];
        for v in self.order_from_sink(g) {
            desc[v] = in_set[v]
                || match self.parent(g, v) {
                    Node::Sink => false,
                    Node::Site(w) => desc[w],
                };
        }
        desc
    }

    /// Undirected lattice edges of the tree as `(site point, direction)`
    /// normalised so that the direction is positive, sorted.
    pub fn lattice_edges(&self, g: &WiredGraph) -> Vec<(Point, u32)> {
        let mut out: Vec<(Point, u32)> = (0..g.len())
            .map(|v| {
                let e = g.edges(v)[self.parent[v] as usize];
                let p = g.point(v);
                if e.label % 2 == 0 {
                    (p, e.label)
                } else {
                    (p.step(e.label as usize), e.label ^ 1)
                }
            })
            .collect();
        out.sort();
        out
    }

    pub fn to_records(&self, g: &WiredGraph) -> Vec<TreeRecord> {
        (0..g.len())
            .map(|v| {
                let e = g.edges(v)[self.parent[v] as usize];
                TreeRecord {
                    site: g.point(v),
                    parent: e.head.site().map(|w| g.point(w)),
                    edge: self.parent[v] as usize,
                    label: e.label,
                }
            })
            .collect()
    }

    pub fn from_records(g: &WiredGraph, records: &[TreeRecord]) -> Result<OrientedTree> {
        let mut parent = vec![usize::MAX; g.len()];
        for r in records {
            let v = g
                .site_of(&r.site)
                .ok_or_else(|| Error::InvalidTree(format!("site {} is not in the region", r.site)))?;
            let e = g
                .edges(v)
                .get(r.edge)
                .ok_or_else(|| Error::InvalidTree(format!("site {} has no edge {}", r.site, r.edge)))?;
            let head = r.parent.map(|p| g.site_of(&p));
            let matches = match (e.head, head) {
                (Node::Sink, None) => true,
                (Node::Site(w), Some(Some(x))) => w == x,
                _ => false,
            };
            if !matches || e.label != r.label {
                return Err(Error::InvalidTree(format!("record for {} does not match edge {}", r.site, r.edge)));
            }
            parent[v] = r.edge;
        }
        if let Some(v) = parent.iter().position(|&e| e == usize::MAX) {
            return Err(Error::InvalidTree(format!("no arrow for site {}", g.point(v))));
        }
        OrientedTree::new(g, parent)
    }
}

/// All spanning trees of `g`, by enumerating every choice of one outgoing
/// arrow per site and keeping the acyclic ones. Independent of any
/// determinant or bijection code. Fails if the number of arrow choices
/// exceeds `budget`.
pub fn enumerate_spanning_trees(g: &WiredGraph, budget: u128) -> Result<Vec<OrientedTree>> {
    let total: u128 = (0..g.len()).map(|v| g.degree(v) as u128).product();
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    let n = g.len();
    let mut choice = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let t = OrientedTree::from_edges_unchecked(choice.clone());
        if t.validate(g).is_ok() {
            out.push(t);
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < g.degree(i) {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
