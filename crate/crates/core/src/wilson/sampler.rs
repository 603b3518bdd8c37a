use std::collections::HashMap;
use std::hash::Hash;

use super::rng;
use super::stacks::{cycle_pop_region, ArrowStacks, PopPolicy, STEP_BUDGET};
use crate::error::{Error, Result};
use crate::lattice::{Node, WiredGraph};
use crate::tree::OrientedTree;

/// Chronological loop erasure.
pub fn loop_erase<T: Copy + Eq + Hash>(path: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    let mut at: HashMap<T, usize> = HashMap::new();
    for &x in path {
        if let Some(&i) = at.get(&x) {
            for y in out.drain(i + 1..) {
                at.remove(&y);
            }
        } else {
            at.insert(x, out.len());
            out.push(x);
        }
    }
    out
}

/// Loop erasure of a walk in `g`; consecutive entries must be adjacent.
pub fn loop_erase_walk(g: &WiredGraph, path: &[Node]) -> Result<Vec<Node>> {
    for w in path.windows(2) {
        let adjacent = match (w[0], w[1]) {
            (Node::Site(a), b) => g.edges(a).iter().any(|e| e.head == b),
            (Node::Sink, Node::Site(b)) => g.sink_multiplicity(b) > 0,
            (Node::Sink, Node::Sink) => false,
        };
        if !adjacent {
            let idx = |n: Node| n.site().unwrap_or(usize::MAX);
            return Err(Error::NotAdjacent(idx(w[0]), idx(w[1])));
        }
    }
    Ok(loop_erase(path))
}

/// Wilson's algorithm on the stacks of `seed`: loop-erased walks from each
/// site in index order to the current tree, rooted at the sink. Equals the
/// tree exposed by popping all cycles of `ArrowStacks::new(seed)`.
pub fn sample_ust(g: &WiredGraph, seed: u64) -> OrientedTree {
    let n = g.len();
    let bases: Vec<u64> = (0..n).map(|v| rng::stream_base(seed, g.stack_key(v))).collect();
    let mut cursor = vec![0u64; n];
    let mut next = vec![usize::MAX; n];
    let mut in_tree = vec![false; n];
    let mut steps = 0u64;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let e = rng::reduce(rng::stream_word(bases[u], cursor[u]), g.degree(u));
            cursor[u] += 1;
            next[u] = e;
            steps += 1;
            assert!(steps <= STEP_BUDGET, "{}", Error::StepBudget(STEP_BUDGET));
            match g.edges(u)[e].head {
                Node::Site(w) => u = w,
                Node::Sink => break,
            }
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            match g.edges(u)[next[u]].head {
                Node::Site(w) => u = w,
                Node::Sink => break,
            }
        }
    }
    OrientedTree::from_edges_unchecked(next)
}

/// Trees of a nested pair `Λ ⊆ Λ′` read from one set of stacks: cycles inside
/// `Λ` are popped first (exposing `T_Λ`), then popping continues inside `Λ′`.
pub fn coupled_pair(inner: &WiredGraph, outer: &WiredGraph, seed: u64) -> Result<(OrientedTree, OrientedTree)> {
    if !inner.is_lattice() || !outer.is_lattice() || inner.dim() != outer.dim() {
        return Err(Error::NotNested("coupling needs two lattice regions of equal dimension".into()));
    }
    if let Some(p) = inner.points().iter().find(|p| outer.site_of(p).is_none()) {
        return Err(Error::NotNested(format!("{p} lies in the inner region only")));
    }
    let mut stacks = ArrowStacks::new(seed);
    cycle_pop_region(&mut stacks, inner, &vec![true; inner.len()], PopPolicy::Sequential)?;
    let t_inner = stacks.exposed_tree(inner)?;
    cycle_pop_region(&mut stacks, outer, &vec![true; outer.len()], PopPolicy::Sequential)?;
    let t_outer = stacks.exposed_tree(outer)?;
    Ok((t_inner, t_outer))
}
