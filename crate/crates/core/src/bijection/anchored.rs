use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{Anchor, Node, Point, WiredGraph};
use crate::sandpile::{Burner, SandpileConfig};
use crate::tree::OrientedTree;

/// One non-empty burning set `B^{(i)}_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurnStep {
    pub phase: usize,
    pub step: usize,
    pub sites: Vec<usize>,
}

/// Complete history of the anchored burning of a recurrent configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSchedule {
    /// `K = max{k : D_k ⊆ Λ}`.
    pub depth: usize,
    /// Non-empty sets in lexicographic `(phase, step)` order.
    pub steps: Vec<BurnStep>,
    /// `(phase, step)` of each site.
    pub time: Vec<(usize, usize)>,
    /// 1-based position of each site's set in `steps`: the burning time `τ`.
    pub rank: Vec<usize>,
}

impl PhaseSchedule {
    fn from_times(depth: usize, time: Vec<(usize, usize)>) -> PhaseSchedule {
        let pairs: BTreeSet<(usize, usize)> = time.iter().copied().collect();
        let mut steps: Vec<BurnStep> = pairs
            .iter()
            .map(|&(phase, step)| BurnStep { phase, step, sites: Vec::new() })
            .collect();
        let position: std::collections::HashMap<(usize, usize), usize> =
            pairs.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut rank = vec![0; time.len()];
        for (v, &t) in time.iter().enumerate() {
            let i = position[&t];
            steps[i].sites.push(v);
            rank[v] = i + 1;
        }
        PhaseSchedule { depth, steps, time, rank }
    }

    /// Indicator of `U^{(i)}_0`: sites not burnt before phase `i` starts.
    pub fn unburnt_at_phase_start(&self, phase: usize) -> Vec<bool> {
        self.time.iter().map(|&(p, _)| p >= phase).collect()
    }

    /// Rows `(site, phase, step, rank)` for CSV export, in site order.
    pub fn to_csv(&self, g: &WiredGraph) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for a in 0..g.dim() {
            let _ = write!(out, "x{},", a + 1);
        }
        out.push_str("phase,step,rank\n");
        for v in 0..g.len() {
            for x in g.point(v).coords() {
                let _ = write!(out, "{x},");
            }
            let (p, s) = self.time[v];
            let _ = writeln!(out, "{p},{s},{}", self.rank[v]);
        }
        out
    }
}

/// Anchor levels of the sites, cut at `K`.
pub(crate) struct Levels {
    depth: usize,
    level: Vec<Option<usize>>,
}

impl Levels {
    pub(crate) fn new(g: &WiredGraph, anchor: Option<&Anchor>) -> Levels {
        match anchor {
            None => Levels { depth: 0, level: vec![None; g.len()] },
            Some(a) => {
                let depth = a.effective_depth(g);
                Levels { depth, level: a.site_levels(g, depth) }
            }
        }
    }

    /// Whether `v` may burn in phase `i`, i.e. `v ∉ D_{K-i+1}`.
    fn allowed(&self, v: usize, phase: usize) -> bool {
        match self.level[v] {
            None => true,
            Some(l) => l + phase > self.depth + 1,
        }
    }
}

pub(crate) fn burn_with_levels(g: &WiredGraph, eta: &SandpileConfig, levels: &Levels) -> Result<PhaseSchedule> {
    eta.check_stable(g)?;
    let mut burner = Burner::new(g, &eta.heights);
    let mut time = vec![(0, 0); g.len()];
    for phase in 1..=levels.depth + 1 {
        let steps = burner.run_phase(|v| levels.allowed(v, phase));
        for (j, set) in steps.iter().enumerate() {
            for &v in set {
                time[v] = (phase, j + 1);
            }
        }
    }
    let left = burner.unburnt();
    if !left.is_empty() {
        return Err(Error::NonRecurrent { unburnt: left.len() });
    }
    Ok(PhaseSchedule::from_times(levels.depth, time))
}

/// The phased burning driven by `anchor`: phase `i` runs Dhar's algorithm
/// forbidding `D_{K-i+1}`, for `i = 1..=K+1`.
pub fn anchored_burn(g: &WiredGraph, eta: &SandpileConfig, anchor: &Anchor) -> Result<PhaseSchedule> {
    burn_with_levels(g, eta, &Levels::new(g, Some(anchor)))
}

/// Edge classes of site `v` burnt at `time[v]`: the number of edges to sites
/// still unburnt at that step, and the ordered indices of `F_v`.
fn edge_classes(g: &WiredGraph, time: &[(usize, usize)], v: usize) -> (usize, Vec<usize>) {
    let (phase, step) = time[v];
    let mut deg_unburnt = 0;
    let mut frontier = Vec::new();
    for (i, e) in g.edges(v).iter().enumerate() {
        match e.head {
            Node::Site(w) if time[w] >= (phase, step) => deg_unburnt += 1,
            Node::Site(w) => {
                let t = time[w];
                let in_previous = if step == 1 { t < (phase, 1) } else { t == (phase, step - 1) };
                if in_previous {
                    frontier.push(i);
                }
            }
            Node::Sink => {
                if step == 1 {
                    frontier.push(i);
                }
            }
        }
    }
    (deg_unburnt, frontier)
}

pub(crate) fn forward_with_levels(g: &WiredGraph, eta: &SandpileConfig, levels: &Levels) -> Result<OrientedTree> {
    let schedule = burn_with_levels(g, eta, levels)?;
    let mut parent = Vec::with_capacity(g.len());
    for v in 0..g.len() {
        let (deg_unburnt, frontier) = edge_classes(g, &schedule.time, v);
        // η(v) = deg(v) - m_v + ℓ with m_v = deg(v) - deg_U(v)
        let ell = eta.heights[v] as i64 - deg_unburnt as i64;
        if ell < 0 || ell as usize >= frontier.len() {
            return Err(Error::Internal(format!(
                "rank {ell} outside 0..{} at site {v}",
                frontier.len()
            )));
        }
        parent.push(frontier[ell as usize]);
    }
    Ok(OrientedTree::from_edges_unchecked(parent))
}

/// Reconstruct the burning schedule from a tree: the phase of `v` is the
/// least `i` with `v ∉ desc_t(D_{K-i+1})`, its step is one more than its
/// parent's within the same phase and 1 otherwise.
pub(crate) fn schedule_of_tree(g: &WiredGraph, t: &OrientedTree, levels: &Levels) -> Result<PhaseSchedule> {
    t.validate(g)?;
    let k = levels.depth;
    // least anchor level met on the path from v to the sink
    let mut path_level = vec![usize::MAX; g.len()];
    let mut time = vec![(0usize, 0usize); g.len()];
    for v in t.order_from_sink(g) {
        let own = levels.level[v].unwrap_or(usize::MAX);
        let parent = t.parent(g, v);
        let inherited = parent.site().map_or(usize::MAX, |w| path_level[w]);
        path_level[v] = own.min(inherited);
        let phase = if path_level[v] <= k { k + 2 - path_level[v] } else { 1 };
        let step = match parent {
            Node::Site(w) if time[w].0 == phase => time[w].1 + 1,
            _ => 1,
        };
        time[v] = (phase, step);
    }
    Ok(PhaseSchedule::from_times(k, time))
}

pub(crate) fn inverse_with_levels(g: &WiredGraph, t: &OrientedTree, levels: &Levels) -> Result<SandpileConfig> {
    let schedule = schedule_of_tree(g, t, levels)?;
    let mut heights = Vec::with_capacity(g.len());
    for v in 0..g.len() {
        let (deg_unburnt, frontier) = edge_classes(g, &schedule.time, v);
        let e = t.parent_edge(v);
        let ell = frontier
            .iter()
            .position(|&f| f == e)
            .ok_or_else(|| Error::Internal(format!("parent edge of site {v} is not in its frontier")))?;
        heights.push((deg_unburnt + ell) as u32);
    }
    Ok(SandpileConfig { heights })
}

/// `φ_{D,Λ}`: recurrent configuration to wired spanning tree.
pub fn anchored_forward(g: &WiredGraph, eta: &SandpileConfig, anchor: &Anchor) -> Result<OrientedTree> {
    forward_with_levels(g, eta, &Levels::new(g, Some(anchor)))
}

/// `φ_{D,Λ}^{-1}`: wired spanning tree to recurrent configuration.
pub fn anchored_inverse(g: &WiredGraph, t: &OrientedTree, anchor: &Anchor) -> Result<SandpileConfig> {
    inverse_with_levels(g, t, &Levels::new(g, Some(anchor)))
}

/// The schedule of `anchored_inverse(t)`, read off the tree alone.
pub fn tree_schedule(g: &WiredGraph, t: &OrientedTree, anchor: &Anchor) -> Result<PhaseSchedule> {
    schedule_of_tree(g, t, &Levels::new(g, Some(anchor)))
}

/// The classic burning bijection `φ_G` (no anchor, a single phase).
pub fn classic_forward(g: &WiredGraph, eta: &SandpileConfig) -> Result<OrientedTree> {
    forward_with_levels(g, eta, &Levels::new(g, None))
}

pub fn classic_inverse(g: &WiredGraph, t: &OrientedTree) -> Result<SandpileConfig> {
    inverse_with_levels(g, t, &Levels::new(g, None))
}

/// Dhar's single-phase schedule as a [`PhaseSchedule`] with `K = 0`.
pub fn classic_burn(g: &WiredGraph, eta: &SandpileConfig) -> Result<PhaseSchedule> {
    burn_with_levels(g, eta, &Levels::new(g, None))
}

/// Burning times `τ(v) - τ(o)` of the anchored burning, for `o ∈ D_1`.
pub fn burning_times(g: &WiredGraph, eta: &SandpileConfig, anchor: &Anchor, origin: &Point) -> Result<Vec<i64>> {
    if anchor.level(origin) != Some(1) {
        return Err(Error::Precondition(format!("origin {origin} is not in D_1")));
    }
    let o = g
        .site_of(origin)
        .ok_or_else(|| Error::Precondition(format!("origin {origin} is not in the region")))?;
    let schedule = anchored_burn(g, eta, anchor)?;
    let base = schedule.rank[o] as i64;
    Ok(schedule.rank.iter().map(|&r| r as i64 - base).collect())
}
