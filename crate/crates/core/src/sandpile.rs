//! Sandpile configurations, toppling and stabilization, and Dhar's burning
//! algorithm.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Node, Point, WiredGraph};

/// Heights `η(v)` on the sites of a wired graph, indexed like the graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SandpileConfig {
    pub heights: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightRecord {
    pub site: Point,
    pub height: u32,
}

/// Order in which enabled vertices topple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToppleOrder {
    /// First-in first-out queue of unstable sites.
    Fifo,
    /// Uniformly random unstable site at each toppling, from a seeded RNG.
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StabilizationReport {
    pub topplings: Vec<u64>,
    pub grains_to_sink: u64,
}

impl StabilizationReport {
    pub fn total_topplings(&self) -> u64 {
        self.topplings.iter().sum()
    }
}

/// History of a (possibly restricted) burning run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurnResult {
    /// `B_1, B_2, ...`, each sorted and non-empty.
    pub burn_sets: Vec<Vec<usize>>,
    /// Step `j` at which each site burnt.
    pub burn_time: Vec<Option<usize>>,
    /// Sites that never burnt, sorted.
    pub unburnt: Vec<usize>,
}

impl SandpileConfig {
    pub fn new(heights: Vec<u32>) -> Self {
        SandpileConfig { heights }
    }

    pub fn zeros(g: &WiredGraph) -> Self {
        SandpileConfig { heights: vec![0; g.len()] }
    }

    /// The maximal stable configuration `deg(v) - 1`.
    pub fn max_stable(g: &WiredGraph) -> Self {
        SandpileConfig {
            heights: (0..g.len()).map(|v| g.degree(v) as u32 - 1).collect(),
        }
    }

    pub fn mass(&self) -> u64 {
        self.heights.iter().map(|&h| h as u64).sum()
    }

    pub fn check_len(&self, g: &WiredGraph) -> Result<()> {
        if self.heights.len() != g.len() {
            return Err(Error::ConfigLength { expected: g.len(), got: self.heights.len() });
        }
        Ok(())
    }

    pub fn is_stable(&self, g: &WiredGraph) -> bool {
        self.heights.len() == g.len() && self.heights.iter().enumerate().all(|(v, &h)| (h as usize) < g.degree(v))
    }

    pub fn check_stable(&self, g: &WiredGraph) -> Result<()> {
        self.check_len(g)?;
        for (v, &h) in self.heights.iter().enumerate() {
            if h as usize >= g.degree(v) {
                return Err(Error::Unstable { vertex: v, height: h, degree: g.degree(v) });
            }
        }
        Ok(())
    }

    pub fn to_records(&self, g: &WiredGraph) -> Vec<HeightRecord> {
        self.heights
            .iter()
            .enumerate()
            .map(|(v, &h)| HeightRecord { site: g.point(v), height: h })
            .collect()
    }

    pub fn from_records(g: &WiredGraph, records: &[HeightRecord]) -> Result<SandpileConfig> {
        let mut heights = vec![None; g.len()];
        for r in records {
            let v = g
                .site_of(&r.site)
                .ok_or_else(|| Error::Parse(format!("site {} is not in the region", r.site)))?;
            heights[v] = Some(r.height);
        }
        let heights = heights
            .into_iter()
            .enumerate()
            .map(|(v, h)| h.ok_or_else(|| Error::Parse(format!("no height for site {}", g.point(v)))))
            .collect::<Result<_>>()?;
        Ok(SandpileConfig { heights })
    }

    /// Flat CSV: one row per site, coordinates then height.
    pub fn to_csv(&self, g: &WiredGraph) -> String {
        let mut out = String::new();
        for a in 0..g.dim() {
            let _ = write!(out, "x{},", a + 1);
        }
        out.push_str("height\n");
        for (v, &h) in self.heights.iter().enumerate() {
            for x in g.point(v).coords() {
                let _ = write!(out, "{x},");
            }
            let _ = writeln!(out, "{h}");
        }
        out
    }
}

/// Topple until stable. The result and the toppling counts do not depend on
/// `order`.
pub fn stabilize(
    g: &WiredGraph,
    eta: &SandpileConfig,
    order: ToppleOrder,
) -> Result<(SandpileConfig, StabilizationReport)> {
    eta.check_len(g)?;
    let mut h = eta.heights.clone();
    let mut report = StabilizationReport { topplings: vec![0; g.len()], grains_to_sink: 0 };
    let unstable = |h: &[u32], v: usize| h[v] as usize >= g.degree(v);

    let topple = |h: &mut Vec<u32>, v: usize, report: &mut StabilizationReport, enabled: &mut dyn FnMut(usize)| {
        h[v] -= g.degree(v) as u32;
        report.topplings[v] += 1;
        for e in g.edges(v) {
            match e.head {
                Node::Site(w) => {
                    h[w] += 1;
                    if h[w] as usize == g.degree(w) {
                        enabled(w);
                    }
                }
                Node::Sink => report.grains_to_sink += 1,
            }
        }
    };

    match order {
        ToppleOrder::Fifo => {
            let mut queue: VecDeque<usize> = (0..g.len()).filter(|&v| unstable(&h, v)).collect();
            while let Some(v) = queue.pop_front() {
                let mut newly = Vec::new();
                topple(&mut h, v, &mut report, &mut |w| newly.push(w));
                queue.extend(newly);
                if unstable(&h, v) {
                    queue.push_back(v);
                }
            }
        }
        ToppleOrder::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pool: Vec<usize> = (0..g.len()).filter(|&v| unstable(&h, v)).collect();
            while !pool.is_empty() {
                let i = rng.gen_range(0..pool.len());
                let v = pool.swap_remove(i);
                let mut newly = Vec::new();
                topple(&mut h, v, &mut report, &mut |w| newly.push(w));
                pool.extend(newly);
                if unstable(&h, v) {
                    pool.push(v);
                }
            }
        }
    }
    Ok((SandpileConfig { heights: h }, report))
}

/// Add one grain at `v` and stabilize: one step of the sandpile Markov chain.
pub fn add_and_stabilize(
    g: &WiredGraph,
    eta: &SandpileConfig,
    v: Node,
) -> Result<(SandpileConfig, StabilizationReport)> {
    let Node::Site(v) = v else {
        return Err(Error::SinkVertex);
    };
    eta.check_stable(g)?;
    if v >= g.len() {
        return Err(Error::Precondition(format!("site {v} out of range")));
    }
    let mut next = eta.clone();
    next.heights[v] += 1;
    stabilize(g, &next, ToppleOrder::Fifo)
}

/// Incremental burning state shared by Dhar's algorithm and the phased
/// anchored burning.
pub(crate) struct Burner<'a> {
    g: &'a WiredGraph,
    heights: &'a [u32],
    burnt: Vec<bool>,
    /// `deg_U(v)`: edges from `v` to unburnt sites.
    deg_unburnt: Vec<usize>,
    mark: Vec<bool>,
}

impl<'a> Burner<'a> {
    pub(crate) fn new(g: &'a WiredGraph, heights: &'a [u32]) -> Self {
        let deg_unburnt = (0..g.len())
            .map(|v| g.edges(v).iter().filter(|e| e.head != Node::Sink).count())
            .collect();
        Burner { g, heights, burnt: vec![false; g.len()], deg_unburnt, mark: vec![false; g.len()] }
    }

    /// Burn steps until nothing allowed is burnable; returns the steps.
    pub(crate) fn run_phase(&mut self, allowed: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut steps = Vec::new();
        let mut candidates: Vec<usize> = (0..self.g.len()).filter(|&v| !self.burnt[v] && allowed(v)).collect();
        loop {
            let mut step: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&v| self.heights[v] as usize >= self.deg_unburnt[v])
                .collect();
            if step.is_empty() {
                return steps;
            }
            step.sort_unstable();
            for &v in &step {
                self.burnt[v] = true;
            }
            candidates.clear();
            for &v in &step {
                for e in self.g.edges(v) {
                    if let Node::Site(w) = e.head {
                        if !self.burnt[w] {
                            self.deg_unburnt[w] -= 1;
                            if !self.mark[w] && allowed(w) {
                                self.mark[w] = true;
                                candidates.push(w);
                            }
                        }
                    }
                }
            }
            for &w in &candidates {
                self.mark[w] = false;
            }
            steps.push(step);
        }
    }

    pub(crate) fn unburnt(&self) -> Vec<usize> {
        (0..self.g.len()).filter(|&v| !self.burnt[v]).collect()
    }
}

/// Dhar's burning algorithm: `B_j = {v ∈ U_{j-1} : η(v) >= deg_{U_{j-1}}(v)}`,
/// never burning sites marked in `forbidden`.
pub fn dhar_burn(g: &WiredGraph, eta: &SandpileConfig, forbidden: &[bool]) -> Result<BurnResult> {
    eta.check_stable(g)?;
    if forbidden.len() != g.len() {
        return Err(Error::ConfigLength { expected: g.len(), got: forbidden.len() });
    }
    let mut burner = Burner::new(g, &eta.heights);
    let burn_sets = burner.run_phase(|v| !forbidden[v]);
    let mut burn_time = vec![None; g.len()];
    for (j, set) in burn_sets.iter().enumerate() {
        for &v in set {
            burn_time[v] = Some(j + 1);
        }
    }
    Ok(BurnResult { burn_sets, burn_time, unburnt: burner.unburnt() })
}

/// Recurrence test: the unrestricted burning algorithm burns every site.
pub fn is_recurrent(g: &WiredGraph, eta: &SandpileConfig) -> Result<bool> {
    let r = dhar_burn(g, eta, &vec![false; g.len()])?;
    Ok(r.unburnt.is_empty())
}

/// All recurrent configurations in lexicographic height order.
pub fn enumerate_recurrent(g: &WiredGraph, budget: u128) -> Result<Vec<SandpileConfig>> {
    let total: u128 = (0..g.len()).map(|v| g.degree(v) as u128).product();
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    let n = g.len();
    let mut heights = vec![0u32; n];
    let mut out = Vec::new();
    let none = vec![false; n];
    loop {
        let eta = SandpileConfig { heights };
        if dhar_burn(g, &eta, &none)?.unburnt.is_empty() {
            out.push(eta.clone());
        }
        heights = eta.heights;
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            heights[i] += 1;
            if (heights[i] as usize) < g.degree(i) {
                break;
            }
            heights[i] = 0;
        }
    }
}
