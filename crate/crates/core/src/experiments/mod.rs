//! Monte Carlo measurements of finite-volume convergence: exact sampling of
//! recurrent configurations, coupling-failure rates of nested volumes,
//! cylinder-event differences, power-law fits and burning-time offsets.
//!
//! Every trial draws its stacks from a seed derived from the master seed and
//! the trial index, and results are aggregated in trial order, so outputs do
//! not depend on the number of worker threads.

mod output;
mod runs;
mod sampling;
mod stats;

pub use output::{write_outputs, Manifest, RunInfo, PRNG_SCHEME};
pub use runs::{
    coupling_experiment, coupling_fails, coupling_failure_rate, cylinder_probability, cylinder_tv_estimate,
    fit_experiment, fit_rates, offset_stability, offsets_experiment, tv_experiment, CylinderEvent, ExperimentConfig,
    OffsetStability, SummaryRow, TrialSummary, CSV_HEADER,
};
pub use sampling::{sample_recurrent_exact, Window};
pub use stats::{power_law_fit, wilson_interval, Difference, PowerLawFit, Proportion, Z95};

/// Run `f` on a dedicated pool of `threads` workers (0 = all cores).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
