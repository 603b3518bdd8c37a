use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::Window;
use super::stats::{power_law_fit, Difference, PowerLawFit, Proportion};
use crate::error::{Error, Result};
use crate::lattice::{Anchor, Point, Shape};
use crate::wilson::rng::derive_seed;
use crate::wilson::LazyTree;

/// An event depending only on the heights in `D_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CylinderEvent {
    All { k: usize },
    Empty { k: usize },
    SiteHeight { k: usize, site: Point, height: u32 },
    /// Admissible height vectors on `D_k`, listed in the order of the
    /// anchor's points (sorted lexicographically).
    Patterns { k: usize, patterns: BTreeSet<Vec<u32>> },
}

impl CylinderEvent {
    pub fn k(&self) -> usize {
        match *self {
            CylinderEvent::All { k }
            | CylinderEvent::Empty { k }
            | CylinderEvent::SiteHeight { k, .. }
            | CylinderEvent::Patterns { k, .. } => k,
        }
    }

    pub fn validate(&self, anchor: &Anchor) -> Result<()> {
        let k = self.k();
        if k == 0 || k > anchor.depth() {
            return Err(Error::Precondition(format!("event radius {k} outside 1..={}", anchor.depth())));
        }
        match self {
            CylinderEvent::SiteHeight { site, .. } if !anchor.level(site).is_some_and(|l| l <= k) => {
                Err(Error::Precondition(format!("event site {site} is not in D_{k}")))
            }
            CylinderEvent::Patterns { patterns, .. } => {
                let len = anchor.set(k).len();
                match patterns.iter().find(|p| p.len() != len) {
                    Some(p) => Err(Error::ConfigLength { expected: len, got: p.len() }),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Evaluate on the heights of `D_k` (in `anchor.set(k)` order).
    pub fn holds(&self, anchor: &Anchor, heights: &[u32]) -> bool {
        match self {
            CylinderEvent::All { .. } => true,
            CylinderEvent::Empty { .. } => false,
            CylinderEvent::SiteHeight { k, site, height } => {
                let i = anchor.set(*k).iter().position(|p| p == site).expect("validated site");
                heights[i] == *height
            }
            CylinderEvent::Patterns { patterns, .. } => patterns.contains(heights),
        }
    }
}

/// Resolved parameters of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub k: usize,
    /// Volume radii `N_1 < N_2 < …` (Euclidean balls).
    pub radii: Vec<u32>,
    /// Outer radius of coupled pairs is `outer_factor · N`.
    pub outer_factor: u32,
    /// Radius standing in for infinite volume in height-statistics runs.
    pub reference_radius: u32,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(dimension: usize, k: usize, radii: Vec<u32>, trials: u64, seed: u64) -> ExperimentConfig {
        let max = radii.iter().copied().max().unwrap_or(0);
        ExperimentConfig { dimension, k, radii, outer_factor: 4, reference_radius: 4 * max, trials, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=crate::lattice::MAX_DIM).contains(&self.dimension) {
            return Err(Error::UnsupportedDimension { dim: self.dimension, reason: "dimension must be 1..=6" });
        }
        if self.k == 0 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        if self.radii.is_empty() {
            return Err(Error::Precondition("no radii given".into()));
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("radii must be strictly increasing".into()));
        }
        if self.radii[0] as usize <= self.k {
            return Err(Error::Precondition(format!("need k < N_1, got k={} N_1={}", self.k, self.radii[0])));
        }
        if self.outer_factor == 0 {
            return Err(Error::Precondition("outer factor must be positive".into()));
        }
        let max = *self.radii.last().expect("non-empty");
        if self.reference_radius <= max {
            return Err(Error::Precondition(format!("need N_ref > max N, got {} <= {max}", self.reference_radius)));
        }
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be positive".into()));
        }
        Ok(())
    }

    pub fn anchor(&self) -> Result<Anchor> {
        Anchor::euclidean(self.dimension, self.k)
    }
}

/// One CSV row: a statistic measured at radius `n` (against `partner`:
/// the outer radius, reference radius or next radius, depending on the run).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: u32,
    pub partner: u32,
    pub statistic: String,
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SummaryRow {
    fn proportion(n: u32, partner: u32, statistic: impl Into<String>, p: &Proportion) -> SummaryRow {
        SummaryRow {
            n,
            partner,
            statistic: statistic.into(),
            hits: p.hits,
            trials: p.trials,
            estimate: p.estimate,
            ci_low: p.low,
            ci_high: p.high,
        }
    }

    fn value(n: u32, partner: u32, statistic: impl Into<String>, trials: u64, estimate: f64) -> SummaryRow {
        SummaryRow { n, partner, statistic: statistic.into(), hits: 0, trials, estimate, ci_low: estimate, ci_high: estimate }
    }
}

/// Aggregated results of one run; reproducible from its config alone.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub experiment: String,
    pub rows: Vec<SummaryRow>,
}

pub const CSV_HEADER: &str = "experiment,n,partner,statistic,hits,trials,estimate,ci_low,ci_high";

impl TrialSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.experiment, r.n, r.partner, r.statistic, r.hits, r.trials, r.estimate, r.ci_low, r.ci_high
            ));
        }
        out
    }

    pub fn find(&self, n: u32, statistic: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.n == n && r.statistic == statistic)
    }
}

fn trial_seed(master: u64, stream: u64, trial: u64) -> u64 {
    derive_seed(derive_seed(master, stream), trial)
}

fn count_hits(trials: u64, f: impl Fn(u64) -> Result<bool> + Sync + Send) -> Result<u64> {
    let hits: Vec<bool> = (0..trials).into_par_iter().map(f).collect::<Result<_>>()?;
    Ok(hits.into_iter().filter(|&h| h).count() as u64)
}

/// Whether the coupled trees on `ball(n)` and `ball(n_outer)` with stacks
/// `seed` disagree near `D_k`: the descendant sets of `D_k` differ, or some
/// site of the descendant set has different arrows.
pub fn coupling_fails(dim: usize, anchor: &Anchor, k: usize, n: u32, n_outer: u32, seed: u64) -> Result<bool> {
    let core = anchor.set(k);
    let mut inner = LazyTree::new(dim, Shape::Ball { radius: n }, seed);
    let mut outer = LazyTree::new(dim, Shape::Ball { radius: n_outer }, seed);
    let w = inner.descendants(core)?;
    if w != outer.descendants(core)? {
        return Ok(true);
    }
    for p in &w {
        if inner.parent_direction(p)? != outer.parent_direction(p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Frequency of [`coupling_fails`] over `trials` stack seeds.
pub fn coupling_failure_rate(dim: usize, k: usize, n: u32, n_outer: u32, trials: u64, seed: u64) -> Result<Proportion> {
    if n as usize <= k || n_outer < n {
        return Err(Error::Precondition(format!("need k < N <= N', got k={k} N={n} N'={n_outer}")));
    }
    let anchor = Anchor::euclidean(dim, k)?;
    let hits = count_hits(trials, |t| coupling_fails(dim, &anchor, k, n, n_outer, trial_seed(seed, 0, t)))?;
    Ok(Proportion::new(hits, trials))
}

/// Coupling-failure rates for every radius of the config, `N′ = factor·N`.
pub fn coupling_experiment(cfg: &ExperimentConfig) -> Result<TrialSummary> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.radii {
        let outer = n * cfg.outer_factor;
        let p = coupling_failure_rate(cfg.dimension, cfg.k, n, outer, cfg.trials, cfg.seed)?;
        rows.push(SummaryRow::proportion(n, outer, "failure", &p));
    }
    Ok(TrialSummary { experiment: "coupling".into(), rows })
}

/// Fit `rate ≈ C·N^{-α}` to the coupling rows of a summary.
pub fn fit_rates(summary: &TrialSummary, statistic: &str) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> =
        summary.rows.iter().filter(|r| r.statistic == statistic).map(|r| (r.n as f64, r.estimate)).collect();
    power_law_fit(&pts)
}

/// Coupling run followed by a power-law fit of the failure rates.
pub fn fit_experiment(cfg: &ExperimentConfig) -> Result<(TrialSummary, PowerLawFit)> {
    let mut summary = coupling_experiment(cfg)?;
    let fit = fit_rates(&summary, "failure")?;
    let first = cfg.radii[0];
    let last = *cfg.radii.last().expect("validated");
    summary.experiment = "fit".into();
    summary.rows.push(SummaryRow::value(first, last, "alpha", cfg.trials, fit.alpha));
    summary.rows.push(SummaryRow::value(first, last, "intercept", cfg.trials, fit.intercept));
    summary.rows.push(SummaryRow::value(first, last, "r_squared", cfg.trials, fit.r_squared));
    Ok((summary, fit))
}

/// Empirical probability of a cylinder event under exact samples on `ball(n)`.
pub fn cylinder_probability(
    event: &CylinderEvent,
    dim: usize,
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<Proportion> {
    let k = event.k();
    let anchor = Anchor::euclidean(dim, k)?;
    event.validate(&anchor)?;
    if n as usize <= k {
        return Err(Error::Precondition(format!("need k < N, got k={k} N={n}")));
    }
    let shape = Shape::Ball { radius: n };
    let hits = count_hits(trials, |t| {
        let w = Window::sample(dim, shape, &anchor, k, trial_seed(seed, n as u64, t))?;
        Ok(event.holds(&anchor, &w.core_heights(&anchor)?))
    })?;
    Ok(Proportion::new(hits, trials))
}

/// `ν̂_N(E) − ν̂_{N_ref}(E)` from independent samples at the two volumes.
pub fn cylinder_tv_estimate(
    event: &CylinderEvent,
    dim: usize,
    n: u32,
    n_ref: u32,
    trials: u64,
    seed: u64,
) -> Result<Difference> {
    if n_ref < n {
        return Err(Error::Precondition(format!("need N <= N_ref, got N={n} N_ref={n_ref}")));
    }
    let a = cylinder_probability(event, dim, n, trials, seed)?;
    let b = cylinder_probability(event, dim, n_ref, trials, seed)?;
    Ok(Difference::new(a, b))
}

pub fn tv_experiment(cfg: &ExperimentConfig, event: &CylinderEvent) -> Result<TrialSummary> {
    cfg.validate()?;
    if event.k() != cfg.k {
        return Err(Error::Precondition(format!("event radius {} differs from k={}", event.k(), cfg.k)));
    }
    let n_ref = cfg.reference_radius;
    let reference = cylinder_probability(event, cfg.dimension, n_ref, cfg.trials, cfg.seed)?;
    let mut rows = vec![SummaryRow::proportion(n_ref, n_ref, "probability", &reference)];
    for &n in &cfg.radii {
        let p = cylinder_probability(event, cfg.dimension, n, cfg.trials, cfg.seed)?;
        let d = Difference::new(p, reference);
        rows.push(SummaryRow::proportion(n, n_ref, "probability", &p));
        rows.push(SummaryRow {
            n,
            partner: n_ref,
            statistic: "difference".into(),
            hits: 0,
            trials: cfg.trials,
            estimate: d.estimate,
            ci_low: d.low,
            ci_high: d.high,
        });
    }
    Ok(TrialSummary { experiment: "tv".into(), rows })
}

/// Per-radius distribution of `τ(x) − τ(o)` under stacks shared between all
/// radii, with the frequency of identical offsets at consecutive radii.
#[derive(Clone, Debug, PartialEq)]
pub struct OffsetStability {
    pub radii: Vec<u32>,
    pub histograms: Vec<BTreeMap<i64, u64>>,
    /// Agreement between radius `i` and `i + 1`.
    pub agreement: Vec<Proportion>,
}

pub fn offset_stability(dim: usize, k: usize, x: &Point, radii: &[u32], trials: u64, seed: u64) -> Result<OffsetStability> {
    let anchor = Anchor::euclidean(dim, k)?;
    if !anchor.level(x).is_some_and(|l| l <= k) {
        return Err(Error::Precondition(format!("{x} is not in D_{k}")));
    }
    if let Some(&n) = radii.iter().find(|&&n| n as usize <= k) {
        return Err(Error::Precondition(format!("need k < N, got k={k} N={n}")));
    }
    let o = Point::origin(dim);
    let per_trial: Vec<Vec<i64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, 1, t);
            radii
                .iter()
                .map(|&n| Window::sample(dim, Shape::Ball { radius: n }, &anchor, k, s)?.offset(&anchor, x, &o))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut histograms = vec![BTreeMap::new(); radii.len()];
    let mut agree = vec![0u64; radii.len().saturating_sub(1)];
    for offs in &per_trial {
        for (i, &o) in offs.iter().enumerate() {
            *histograms[i].entry(o).or_insert(0) += 1;
        }
        for (i, w) in offs.windows(2).enumerate() {
            agree[i] += (w[0] == w[1]) as u64;
        }
    }
    let agreement = agree.into_iter().map(|a| Proportion::new(a, trials)).collect();
    Ok(OffsetStability { radii: radii.to_vec(), histograms, agreement })
}

pub fn offsets_experiment(cfg: &ExperimentConfig, x: &Point) -> Result<TrialSummary> {
    cfg.validate()?;
    let s = offset_stability(cfg.dimension, cfg.k, x, &cfg.radii, cfg.trials, cfg.seed)?;
    let mut rows = Vec::new();
    for (i, &n) in s.radii.iter().enumerate() {
        if let Some(p) = s.agreement.get(i) {
            rows.push(SummaryRow::proportion(n, s.radii[i + 1], "agreement", p));
        }
        for (&off, &count) in &s.histograms[i] {
            rows.push(SummaryRow::proportion(n, n, format!("offset={off}"), &Proportion::new(count, cfg.trials)));
        }
    }
    Ok(TrialSummary { experiment: "offsets".into(), rows })
}
