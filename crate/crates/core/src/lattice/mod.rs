//! Wired lattice regions of Z^d, anchors, the Z² planar dual and exact
//! spanning-tree counts.

mod anchor;
mod count;
mod dual;
mod graph;
mod point;

pub use anchor::{is_simply_connected, Anchor};
pub use count::{bareiss_determinant, reduced_laplacian, spanning_tree_count};
pub use dual::{dual_tree, DualRegion, DualTree, PrimalEdge};
pub use graph::{build_wired_region, Edge, Node, RegionSpec, Shape, WiredGraph};
pub use point::{ball_points, for_each_in_box, Point, PointHasher, PointMap, PointSet, MAX_DIM};

/// `D_k = {x : |x|_2 <= k}` for `k = 1..=k_max`.
pub fn euclidean_anchor(dim: usize, k_max: usize) -> crate::Result<Anchor> {
    Anchor::euclidean(dim, k_max)
}
