use std::collections::{HashMap, HashSet};

use super::graph::WiredGraph;
use super::point::{ball_points, for_each_in_box, Point};
use crate::error::{Error, Result};

/// A finite anchor: nested vertex sets `D_1 ⊂ D_2 ⊂ ... ⊂ D_{k_max}`, with
/// `D_0 = ∅` implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchor {
    sets: Vec<Vec<Point>>,
    level: HashMap<Point, usize>,
}

impl Anchor {
    /// `D_k = {x ∈ Z^d : |x|_2 <= k}` for `k = 1..=k_max`.
    pub fn euclidean(dim: usize, k_max: usize) -> Result<Anchor> {
        if k_max == 0 {
            return Err(Error::InvalidAnchor("k_max must be at least 1".into()));
        }
        let sets = (1..=k_max).map(|k| ball_points(dim, k as u32)).collect();
        Anchor::from_parts(sets)
    }

    /// Anchor on lattice points. Checks nesting and that every set is simply
    /// connected in Z^d.
    pub fn new(sets: Vec<Vec<Point>>) -> Result<Anchor> {
        let a = Anchor::from_parts(sets)?;
        for (i, set) in a.sets.iter().enumerate() {
            if !is_simply_connected(set) {
                return Err(Error::InvalidAnchor(format!(
                    "D_{} has a bounded complement component",
                    i + 1
                )));
            }
        }
        Ok(a)
    }

    /// Anchor on an abstract graph, where simple connectivity has no lattice
    /// meaning: only nesting is checked.
    pub fn for_abstract_graph(g: &WiredGraph, sets: &[Vec<usize>]) -> Result<Anchor> {
        let sets = sets
            .iter()
            .map(|s| s.iter().map(|&v| g.point(v)).collect())
            .collect();
        Anchor::from_parts(sets)
    }

    fn from_parts(sets: Vec<Vec<Point>>) -> Result<Anchor> {
        if sets.is_empty() {
            return Err(Error::InvalidAnchor("an anchor needs at least one set".into()));
        }
        let mut level = HashMap::new();
        let mut clean = Vec::with_capacity(sets.len());
        for (i, mut set) in sets.into_iter().enumerate() {
            set.sort();
            set.dedup();
            if set.is_empty() {
                return Err(Error::InvalidAnchor(format!("D_{} is empty", i + 1)));
            }
            let members: HashSet<&Point> = set.iter().collect();
            if let Some(prev) = clean.last() {
                let prev: &Vec<Point> = prev;
                if let Some(p) = prev.iter().find(|p| !members.contains(p)) {
                    return Err(Error::InvalidAnchor(format!("D_{i} is not contained in D_{}: {p}", i + 1)));
                }
            }
            for &p in &set {
                level.entry(p).or_insert(i + 1);
            }
            clean.push(set);
        }
        Ok(Anchor { sets: clean, level })
    }

    /// Number of sets `k_max`.
    pub fn depth(&self) -> usize {
        self.sets.len()
    }

    /// `D_k`; `D_0` is empty.
    pub fn set(&self, k: usize) -> &[Point] {
        if k == 0 {
            &[]
        } else {
            &self.sets[k - 1]
        }
    }

    /// The shell `E_k = D_k \ D_{k-1}`.
    pub fn shell(&self, k: usize) -> Vec<Point> {
        self.set(k).iter().copied().filter(|p| self.level[p] == k).collect()
    }

    /// Smallest `k` with `p ∈ D_k`.
    #[inline]
    pub fn level(&self, p: &Point) -> Option<usize> {
        self.level.get(p).copied()
    }

    /// The anchor `D_1..D_k`.
    pub fn truncated(&self, k: usize) -> Result<Anchor> {
        if k == 0 || k > self.depth() {
            return Err(Error::InvalidAnchor(format!("cannot truncate depth {} anchor at {k}", self.depth())));
        }
        let sets = self.sets[..k].to_vec();
        let level = self.level.iter().filter(|(_, &l)| l <= k).map(|(p, &l)| (*p, l)).collect();
        Ok(Anchor { sets, level })
    }

    /// `K = max{k >= 0 : D_k ⊆ Λ}`.
    pub fn effective_depth(&self, g: &WiredGraph) -> usize {
        self.sets
            .iter()
            .take_while(|set| set.iter().all(|p| g.site_of(p).is_some()))
            .count()
    }

    /// Per-site anchor level in `g`, restricted to `k <= max_level`.
    pub fn site_levels(&self, g: &WiredGraph, max_level: usize) -> Vec<Option<usize>> {
        (0..g.len())
            .map(|v| self.level(&g.point(v)).filter(|&l| l <= max_level))
            .collect()
    }
}

/// Whether every connected component of `Z^d \ set` is unbounded.
///
/// Flood-fills the complement inside the bounding box grown by one; a
/// complement cell the fill cannot reach from the box border lies in a
/// bounded component.
pub fn is_simply_connected(set: &[Point]) -> bool {
    let Some(first) = set.first() else {
        return true;
    };
    let dim = first.dim();
    let mut lo = vec![i32::MAX; dim];
    let mut hi = vec![i32::MIN; dim];
    for p in set {
        for a in 0..dim {
            lo[a] = lo[a].min(p.coord(a) - 1);
            hi[a] = hi[a].max(p.coord(a) + 1);
        }
    }
    let members: HashSet<Point> = set.iter().copied().collect();
    let inside = |p: &Point| (0..dim).all(|a| lo[a] <= p.coord(a) && p.coord(a) <= hi[a]);
    // the border layer of the grown box lies outside the set and in
    // unbounded components; start the fill from all of it
    let mut seen: HashSet<Point> = HashSet::new();
    let mut stack = Vec::new();
    for_each_in_box(dim, &lo, &hi, |p| {
        if (0..dim).any(|a| p.coord(a) == lo[a] || p.coord(a) == hi[a]) {
            seen.insert(p);
            stack.push(p);
        }
    });
    while let Some(p) = stack.pop() {
        for dir in 0..2 * dim {
            let q = p.step(dir);
            if inside(&q) && !members.contains(&q) && seen.insert(q) {
                stack.push(q);
            }
        }
    }
    let mut ok = true;
    for_each_in_box(dim, &lo, &hi, |p| {
        if !members.contains(&p) && !seen.contains(&p) {
            ok = false;
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_wired_region, Shape};

    fn pt(c: &[i32]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn euclidean_first_set_is_the_plus_shape() {
        let a = Anchor::euclidean(2, 2).unwrap();
        let mut d1 = [pt(&[0, 0]), pt(&[1, 0]), pt(&[-1, 0]), pt(&[0, 1]), pt(&[0, -1])];
        d1.sort();
        assert_eq!(a.set(1), &d1[..]);
        assert!(a.set(0).is_empty());
        assert_eq!(a.set(2).len(), 13);
        assert!(a.set(1).iter().all(|p| a.set(2).contains(p)));
        assert_eq!(a.shell(2).len(), 8);
        assert_eq!(a.level(&pt(&[0, 0])), Some(1));
        assert_eq!(a.level(&pt(&[1, 1])), Some(2));
        assert_eq!(a.level(&pt(&[3, 0])), None);
    }

    #[test]
    fn shells_partition_the_top_set() {
        let a = Anchor::euclidean(3, 4).unwrap();
        let total: usize = (1..=4).map(|k| a.shell(k).len()).sum();
        assert_eq!(total, a.set(4).len());
        for k in 1..=4 {
            assert!(is_simply_connected(a.set(k)));
        }
    }

    #[test]
    fn annulus_is_rejected() {
        let outer = ball_points(2, 3);
        let inner = ball_points(2, 1);
        let annulus: Vec<Point> = outer.into_iter().filter(|p| !inner.contains(p)).collect();
        assert!(!is_simply_connected(&annulus));
        assert!(matches!(Anchor::new(vec![annulus]), Err(Error::InvalidAnchor(_))));
    }

    #[test]
    fn one_dimensional_gap_is_bounded() {
        assert!(!is_simply_connected(&[pt(&[-1]), pt(&[1])]));
        assert!(is_simply_connected(&[pt(&[-1]), pt(&[0]), pt(&[1])]));
    }

    #[test]
    fn nesting_is_enforced() {
        let err = Anchor::new(vec![vec![pt(&[0, 0])], vec![pt(&[1, 0])]]).unwrap_err();
        assert!(matches!(err, Error::InvalidAnchor(_)));
        assert!(Anchor::euclidean(2, 0).is_err());
    }

    #[test]
    fn effective_depth_counts_sets_inside_the_region() {
        let a = Anchor::euclidean(2, 4).unwrap();
        let g = build_wired_region(2, Shape::Ball { radius: 2 }).unwrap();
        assert_eq!(a.effective_depth(&g), 2);
        let tiny = build_wired_region(2, Shape::Box { side: 2 }).unwrap();
        assert_eq!(a.effective_depth(&tiny), 0);
        let t = a.truncated(1).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.level(&pt(&[1, 1])), None);
    }
}
