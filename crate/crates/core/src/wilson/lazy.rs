use std::collections::VecDeque;

use super::rng;
use super::stacks::STEP_BUDGET;
use crate::error::{Error, Result};
use crate::lattice::{Point, PointMap, PointSet, Shape};

/// The wired UST of a lattice region, revealed only where asked.
///
/// Arrows come from the same stacks as [`super::sample_ust`] on
/// `build_wired_region(dim, shape)`; since the tree exposed by cycle popping
/// does not depend on the popping order, the parent of every revealed site
/// equals its parent in the full sample.
#[derive(Debug)]
pub struct LazyTree {
    dim: usize,
    shape: Shape,
    seed: u64,
    cursor: PointMap<u64>,
    parent: PointMap<u8>,
    // last arrow of each site on the current walk, reused between walks
    walk: PointMap<u8>,
    steps: u64,
}

impl LazyTree {
    pub fn new(dim: usize, shape: Shape, seed: u64) -> Self {
        LazyTree { dim, shape, seed, cursor: PointMap::default(), parent: PointMap::default(), walk: PointMap::default(), steps: 0 }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.shape.contains(p)
    }

    /// Number of sites whose parent has been revealed.
    pub fn revealed(&self) -> usize {
        self.parent.len()
    }

    /// Parent direction of site `p` (a lattice direction; the parent is the
    /// sink if the neighbour lies outside the region).
    pub fn parent_direction(&mut self, p: &Point) -> Result<usize> {
        if let Some(&d) = self.parent.get(p) {
            return Ok(d as usize);
        }
        if !self.contains(p) {
            return Err(Error::Precondition(format!("{p} is outside the region")));
        }
        let deg = 2 * self.dim;
        let mut next = std::mem::take(&mut self.walk);
        next.clear();
        let mut u = *p;
        while self.contains(&u) && !self.parent.contains_key(&u) {
            let c = self.cursor.entry(u).or_insert(0);
            let d = rng::arrow(self.seed, u.key(), *c, deg);
            *c += 1;
            next.insert(u, d as u8);
            self.steps += 1;
            if self.steps > STEP_BUDGET {
                return Err(Error::StepBudget(STEP_BUDGET));
            }
            u = u.step(d);
        }
        let mut u = *p;
        while self.contains(&u) && !self.parent.contains_key(&u) {
            let d = next[&u];
            self.parent.insert(u, d);
            u = u.step(d as usize);
        }
        self.walk = next;
        Ok(self.parent[p] as usize)
    }

    /// `desc_t(D)`: sites whose path to the sink meets `d`, sorted.
    pub fn descendants(&mut self, d: &[Point]) -> Result<Vec<Point>> {
        let mut seen = PointSet::default();
        let mut queue = VecDeque::new();
        for p in d {
            if !self.contains(p) {
                return Err(Error::Precondition(format!("{p} is outside the region")));
            }
            if seen.insert(*p) {
                queue.push_back(*p);
            }
        }
        while let Some(x) = queue.pop_front() {
            for dir in 0..2 * self.dim {
                let y = x.step(dir);
                if seen.contains(&y) || !self.contains(&y) {
                    continue;
                }
                // y is a child of x iff its arrow points back at x
                if self.parent_direction(&y)? == dir ^ 1 {
                    seen.insert(y);
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<Point> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }
}
