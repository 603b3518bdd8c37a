use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::graph::{Node, WiredGraph};

/// Reduced Laplacian over the sites: `Δ_{v,v} = deg(v)`, `Δ_{v,w} = -a_{v,w}`.
pub fn reduced_laplacian(g: &WiredGraph) -> Vec<Vec<i64>> {
    let n = g.len();
    let mut lap = vec![vec![0i64; n]; n];
    for (v, row) in lap.iter_mut().enumerate() {
        row[v] = g.degree(v) as i64;
        for e in g.edges(v) {
            if let Node::Site(w) = e.head {
                row[w] -= 1;
            }
        }
    }
    lap
}

/// Number of spanning trees of the wired graph, `det Δ`, by fraction-free
/// (Bareiss) elimination in arbitrary precision.
pub fn spanning_tree_count(g: &WiredGraph) -> BigUint {
    let lap = reduced_laplacian(g);
    let det = bareiss_determinant(lap.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect());
    // Δ is a nonsingular M-matrix on a wired graph
    det.to_biguint().expect("reduced Laplacian of a wired graph has positive determinant")
}

/// Exact determinant of a square integer matrix.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}
