use std::collections::HashMap;

use crate::bijection::{anchored_inverse, psi_window, window_schedule, AuxGraph};
use crate::error::{Error, Result};
use crate::lattice::{Anchor, Point, Shape, WiredGraph};
use crate::sandpile::SandpileConfig;
use crate::wilson::{sample_ust, LazyTree};

/// An exact sample of the uniform measure on recurrent configurations:
/// the anchored inverse of a Wilson sample.
pub fn sample_recurrent_exact(g: &WiredGraph, anchor: &Anchor, seed: u64) -> Result<SandpileConfig> {
    anchored_inverse(g, &sample_ust(g, seed), anchor)
}

/// The part of a wired UST needed to read off heights on `D_k`: the
/// descendant window `W = desc_t(D_k)` with its auxiliary graph and tree.
pub struct Window {
    pub aux: AuxGraph,
    pub tree: crate::tree::OrientedTree,
}

impl Window {
    /// Reveal the window of the tree with stacks `seed` on the region
    /// `shape ⊂ Z^dim`.
    pub fn sample(dim: usize, shape: Shape, anchor: &Anchor, k: usize, seed: u64) -> Result<Window> {
        let mut lazy = LazyTree::new(dim, shape, seed);
        Window::from_lazy(&mut lazy, anchor, k)
    }

    pub fn from_lazy(lazy: &mut LazyTree, anchor: &Anchor, k: usize) -> Result<Window> {
        if k == 0 || k > anchor.depth() {
            return Err(Error::Precondition(format!("anchor index {k} outside 1..={}", anchor.depth())));
        }
        let core = anchor.set(k);
        if let Some(p) = core.iter().find(|p| !lazy.contains(p)) {
            return Err(Error::Precondition(format!("D_{k} is not inside the region (missing {p})")));
        }
        let w = lazy.descendants(core)?;
        let mut arrows = HashMap::with_capacity(w.len());
        for p in &w {
            arrows.insert(*p, lazy.parent_direction(p)?);
        }
        let aux = AuxGraph::lattice_window(anchor.set(1).first().map_or(0, |p| p.dim()), &w, anchor, k)?;
        let tree = aux.tree_from_ambient(|p| arrows[p])?;
        Ok(Window { aux, tree })
    }

    pub fn points(&self) -> &[Point] {
        self.aux.graph.points()
    }

    /// Heights of `ψ_{W,k}(t)` on `D_k`, in the order of `anchor.set(k)`.
    pub fn core_heights(&self, anchor: &Anchor) -> Result<Vec<u32>> {
        let eta = psi_window(&self.aux, &self.tree, anchor)?;
        let g = &self.aux.graph;
        Ok(anchor.set(self.aux.k).iter().map(|p| eta.heights[g.site_of(p).expect("D_k lies in W")]).collect())
    }

    /// Burning-time offset `τ(x) − τ(o)` for `x, o ∈ D_k`.
    pub fn offset(&self, anchor: &Anchor, x: &Point, o: &Point) -> Result<i64> {
        let schedule = window_schedule(&self.aux, &self.tree, anchor)?;
        let g = &self.aux.graph;
        let rank = |p: &Point| -> Result<i64> {
            let v = g.site_of(p).ok_or_else(|| Error::Precondition(format!("{p} is not in D_{}", self.aux.k)))?;
            Ok(schedule.rank[v] as i64)
        };
        Ok(rank(x)? - rank(o)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bijection::tree_schedule;
    use crate::lattice::build_wired_region;
    use crate::sandpile::is_recurrent;

    #[test]
    fn single_vertex_heights_are_uniform() {
        let g = WiredGraph::from_multigraph(1, &[], &[2]).unwrap();
        let anchor = Anchor::for_abstract_graph(&g, &[vec![0]]).unwrap();
        let ones = (0..20_000).filter(|&s| sample_recurrent_exact(&g, &anchor, s).unwrap().heights[0] == 1).count();
        assert!((ones as f64 / 20_000.0 - 0.5).abs() < 0.015);
    }

    #[test]
    fn window_heights_match_the_full_inverse() {
        // heights on D_k of the full inverse only depend on the window
        let n = 7;
        let shape = Shape::Ball { radius: n };
        let g = build_wired_region(2, shape).unwrap();
        let full = Anchor::euclidean(2, n as usize).unwrap();
        for k in 1..=3 {
            let cut = Anchor::euclidean(2, k).unwrap();
            for seed in 0..40 {
                let eta = sample_recurrent_exact(&g, &full, seed).unwrap();
                assert!(is_recurrent(&g, &eta).unwrap());
                let want: Vec<u32> = cut.set(k).iter().map(|p| eta.heights[g.site_of(p).unwrap()]).collect();
                let w = Window::sample(2, shape, &cut, k, seed).unwrap();
                assert_eq!(w.core_heights(&cut).unwrap(), want, "k={k} seed={seed}");
            }
        }
    }

    #[test]
    fn window_offsets_match_the_full_schedule() {
        let n = 6;
        let shape = Shape::Box { side: 2 * n + 1 };
        let g = build_wired_region(2, shape).unwrap();
        let full = Anchor::euclidean(2, n as usize).unwrap();
        let o = Point::origin(2);
        for k in 1..=2 {
            let cut = Anchor::euclidean(2, k).unwrap();
            for seed in 0..40 {
                let t = sample_ust(&g, seed);
                let s = tree_schedule(&g, &t, &full).unwrap();
                let w = Window::sample(2, shape, &cut, k, seed).unwrap();
                for x in cut.set(k) {
                    let want = s.rank[g.site_of(x).unwrap()] as i64 - s.rank[g.site_of(&o).unwrap()] as i64;
                    assert_eq!(w.offset(&cut, x, &o).unwrap(), want, "k={k} seed={seed} x={x}");
                }
            }
        }
    }

    #[test]
    fn core_must_fit() {
        let anchor = Anchor::euclidean(2, 3).unwrap();
        assert!(Window::sample(2, Shape::Ball { radius: 2 }, &anchor, 3, 0).is_err());
    }
}
