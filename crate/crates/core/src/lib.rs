//! Abelian sandpiles on wired regions of Z^d, the anchored burning bijection
//! with spanning trees, and Wilson's stacks-of-arrows sampler, plus a Monte
//! Carlo harness for finite-volume convergence.

pub mod bijection;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod sandpile;
pub mod tree;
pub mod wilson;

pub use error::{Error, Result};
pub use lattice::{Anchor, Node, Point, Shape, WiredGraph};
pub use sandpile::SandpileConfig;
pub use tree::OrientedTree;
