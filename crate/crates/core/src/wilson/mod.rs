//! Stacks of arrows, cycle popping, loop-erased walks and Wilson's algorithm.

mod lazy;
pub mod rng;
mod sampler;
mod stacks;

pub use lazy::LazyTree;
pub use sampler::{coupled_pair, loop_erase, loop_erase_walk, sample_ust};
pub use stacks::{cycle_pop_region, ArrowStacks, ColouredCycle, PopPolicy, PoppingRecord, STEP_BUDGET};
