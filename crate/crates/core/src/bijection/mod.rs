//! Burning bijections between recurrent sandpiles and wired spanning trees:
//! the classic single-phase map, the anchored phased map `φ_{D,Λ}` with its
//! inverse, and the auxiliary windows `G*_{W,k}` on which the inverse is
//! local.

mod anchored;
mod aux;

pub use anchored::{
    anchored_burn, anchored_forward, anchored_inverse, burning_times, classic_burn, classic_forward,
    classic_inverse, tree_schedule, BurnStep, PhaseSchedule,
};
pub use aux::{psi_window, window_schedule, AuxGraph};

use crate::lattice::{Point, WiredGraph};
use crate::tree::OrientedTree;

/// `desc_t(D)` for a set of points `D`.
pub fn descendants(g: &WiredGraph, t: &OrientedTree, d: &[Point]) -> Vec<bool> {
    t.descendants(g, &g.indicator(d))
}
