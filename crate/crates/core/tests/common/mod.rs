#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sandpile_core::lattice::{build_wired_region, Shape};
use sandpile_core::{Anchor, Node, Point, SandpileConfig, WiredGraph};

pub fn pt(c: &[i32]) -> Point {
    Point::new(c).unwrap()
}

pub fn two_vertex() -> WiredGraph {
    WiredGraph::from_multigraph(2, &[(0, 1, 1)], &[1, 1]).unwrap()
}

pub fn box2x2() -> WiredGraph {
    build_wired_region(2, Shape::Box { side: 2 }).unwrap()
}

/// A graph together with every anchor the bijection tests run it under.
pub struct Case {
    pub name: String,
    pub graph: WiredGraph,
    pub anchors: Vec<Anchor>,
}

/// Every nested chain of prefixes of `sets` (i.e. all truncations).
fn truncations(anchor: Anchor) -> Vec<Anchor> {
    (1..=anchor.depth()).map(|k| anchor.truncated(k).unwrap()).collect()
}

fn lattice_case(name: &str, dim: usize, points: Vec<Point>, anchors: Vec<Anchor>) -> Case {
    let graph = WiredGraph::from_points(dim, &points).unwrap();
    assert!(graph.len() <= 9, "{name}");
    Case { name: name.into(), graph, anchors }
}

/// Wired graphs with at most 9 sites: paths in Z, boxes and polyominoes in
/// Z², the 2×2×2 cube, and seeded random multigraphs, each with a family of
/// anchors (all truncations of each chain).
pub fn small_graphs() -> Vec<Case> {
    let mut out = Vec::new();
    let single = Anchor::new(vec![vec![pt(&[0])]]).unwrap();
    for len in 1..=9 {
        let pts: Vec<Point> = (0..len).map(|x| pt(&[x - len / 2])).collect();
        let mut anchors = truncations(Anchor::euclidean(1, 3).unwrap());
        anchors.push(single.clone());
        anchors.push(Anchor::new(vec![vec![pt(&[0])], vec![pt(&[0]), pt(&[1])]]).unwrap());
        out.push(lattice_case(&format!("path{len}"), 1, pts, anchors));
    }
    let origin2 = Anchor::new(vec![vec![pt(&[0, 0])]]).unwrap();
    let grow = Anchor::new(vec![
        vec![pt(&[0, 0])],
        vec![pt(&[0, 0]), pt(&[1, 0])],
        vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])],
    ])
    .unwrap();
    let mut planar = truncations(grow);
    planar.push(origin2.clone());
    planar.extend(truncations(Anchor::euclidean(2, 2).unwrap()));
    let boxes = [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)];
    for (w, h) in boxes {
        let mut pts = Vec::new();
        for x in -1..w - 1 {
            for y in -1..h - 1 {
                pts.push(pt(&[x, y]));
            }
        }
        out.push(lattice_case(&format!("box{w}x{h}"), 2, pts, planar.clone()));
    }
    let polyominoes: [(&str, &[[i32; 2]]); 4] = [
        ("plus", &[[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]]),
        ("ell", &[[0, 0], [1, 0], [2, 0], [0, 1], [0, 2]]),
        ("snake", &[[0, 0], [1, 0], [1, 1], [2, 1], [2, 2], [3, 2]]),
        ("tee", &[[0, 0], [1, 0], [-1, 0], [0, 1], [0, 2], [1, 1], [-1, 1]]),
    ];
    for (name, cells) in polyominoes {
        let pts = cells.iter().map(|c| pt(c)).collect();
        out.push(lattice_case(name, 2, pts, planar.clone()));
    }
    let mut cube = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                cube.push(pt(&[x, y, z]));
            }
        }
    }
    let cube_anchor = Anchor::new(vec![vec![pt(&[0, 0, 0])], vec![pt(&[0, 0, 0]), pt(&[0, 0, 1])]]).unwrap();
    out.push(lattice_case("cube2", 3, cube, truncations(cube_anchor)));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..24 {
        let g = random_multigraph(&mut rng, 2 + i % 5);
        let n = g.len();
        let mut anchors = vec![Anchor::for_abstract_graph(&g, &[vec![0]]).unwrap()];
        if n >= 3 {
            anchors.push(Anchor::for_abstract_graph(&g, &[vec![1], vec![0, 1], (0..n).collect()]).unwrap());
        }
        out.push(Case { name: format!("multigraph{i}"), graph: g, anchors });
    }
    out
}

/// Connected multigraph on `n` sites with at least one sink edge.
pub fn random_multigraph(rng: &mut ChaCha8Rng, n: usize) -> WiredGraph {
    let mut internal = Vec::new();
    for v in 1..n {
        // spanning path keeps the graph connected
        internal.push((rng.gen_range(0..v), v, rng.gen_range(1..=2u32)));
    }
    for _ in 0..n / 2 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            internal.push((a, b, 1));
        }
    }
    let mut sink: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
    if sink.iter().all(|&s| s == 0) {
        sink[rng.gen_range(0..n)] = 1 + rng.gen_range(0..2);
    }
    WiredGraph::from_multigraph(n, &internal, &sink).unwrap()
}

/// Recurrence via ampleness: every non-empty set of sites contains a site
/// whose height is at least its number of edges into the set.
pub fn is_ample(g: &WiredGraph, eta: &SandpileConfig) -> bool {
    let n = g.len();
    assert!(n <= 20);
    (1u32..(1 << n)).all(|mask| {
        (0..n).filter(|&v| mask & (1 << v) != 0).any(|v| {
            let inside = g
                .edges(v)
                .iter()
                .filter(|e| matches!(e.head, Node::Site(u) if mask & (1 << u) != 0))
                .count();
            eta.heights[v] as usize >= inside
        })
    })
}

/// Tree distance to the sink of every site, by walking parent pointers.
pub fn tree_distances(g: &WiredGraph, t: &sandpile_core::OrientedTree) -> Vec<usize> {
    (0..g.len())
        .map(|v| {
            let mut d = 1;
            let mut u = v;
            while let Node::Site(w) = t.parent(g, u) {
                u = w;
                d += 1;
            }
            d
        })
        .collect()
}

/// Upper-tail probability `Q(a, x)` of the regularised incomplete gamma
/// function, by series for `x < a + 1` and Lentz's continued fraction beyond.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    let ln_gamma_a = ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        1.0 - sum * (-x + a * x.ln() - ln_gamma_a).exp()
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-15 {
                break;
            }
        }
        (-x + a * x.ln() - ln_gamma_a).exp() * h
    }
}

/// Lanczos approximation (g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut s = C[0];
    for (i, &c) in C.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

/// Chi-square critical value with upper tail `alpha`, by bisection on `Q`.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 10.0 * df as f64 + 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma_q(df as f64 / 2.0, mid / 2.0) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn chi_square(counts: &[u64], expected: f64) -> f64 {
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}
