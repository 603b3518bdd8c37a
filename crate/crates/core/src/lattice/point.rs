use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{BuildHasherDefault, Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest lattice dimension supported by the fixed-size [`Point`] layout.
pub const MAX_DIM: usize = 6;

/// A point of Z^d, `1 <= d <= MAX_DIM`.
///
/// Points are `Copy` and hash cheaply, which matters for the lazily grown
/// hash maps used when sampling on large balls.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct Point {
    dim: u8,
    coords: [i32; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[i32]) -> Result<Point> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension {
                dim: coords.len(),
                reason: "points need 1..=6 coordinates",
            });
        }
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    /// The origin of Z^d.
    pub fn origin(dim: usize) -> Point {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Point {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> i32 {
        self.coords[axis]
    }

    /// Squared Euclidean norm.
    #[inline]
    pub fn norm2(&self) -> i64 {
        self.coords()
            .iter()
            .map(|&x| (x as i64) * (x as i64))
            .sum()
    }

    /// Neighbour in lattice direction `dir`: `2a` is `+e_a`, `2a+1` is `-e_a`.
    #[inline]
    pub fn step(&self, dir: usize) -> Point {
        let mut p = *self;
        let axis = dir / 2;
        debug_assert!(axis < self.dim());
        if dir % 2 == 0 {
            p.coords[axis] += 1;
        } else {
            p.coords[axis] -= 1;
        }
        p
    }

    /// Translate by `delta` along `axis`.
    #[inline]
    pub fn offset(&self, axis: usize, delta: i32) -> Point {
        let mut p = *self;
        p.coords[axis] += delta;
        p
    }

    /// Direction index `dir` with `self.step(dir) == other`, if adjacent.
    pub fn direction_to(&self, other: &Point) -> Option<usize> {
        if self.dim != other.dim {
            return None;
        }
        let mut found = None;
        for axis in 0..self.dim() {
            match other.coords[axis] - self.coords[axis] {
                0 => {}
                1 if found.is_none() => found = Some(2 * axis),
                -1 if found.is_none() => found = Some(2 * axis + 1),
                _ => return None,
            }
        }
        found
    }

    /// A 64-bit key identifying this point, used to key the arrow stacks.
    ///
    /// Coordinates are packed in 10-bit two's complement fields after a
    /// dimension tag, and fall back to a mixing hash outside that range so the
    /// key is always a deterministic function of the point.
    pub fn key(&self) -> u64 {
        let d = self.dim();
        let fits = self.coords().iter().all(|&x| (-512..512).contains(&x));
        if fits {
            let mut k = d as u64;
            for &x in self.coords() {
                k = (k << 10) | ((x as i64 as u64) & 0x3ff);
            }
            k
        } else {
            let mut h = 0x9e37_79b9_7f4a_7c15u64 ^ (d as u64) ^ (1 << 63);
            for &x in self.coords() {
                h = crate::wilson::rng::mix64(h ^ (x as i64 as u64));
            }
            h | (1 << 63)
        }
    }
}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.key());
    }
}

/// Hasher for [`Point`] keys: the packed key is already well spread, so one
/// multiply-xorshift round is enough.
#[derive(Default)]
pub struct PointHasher(u64);

impl Hasher for PointHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_u64(&mut self, x: u64) {
        let z = (self.0 ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 = z ^ (z >> 29);
    }
}

pub type PointMap<V> = HashMap<Point, V, BuildHasherDefault<PointHasher>>;
pub type PointSet = HashSet<Point, BuildHasherDefault<PointHasher>>;

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<i32>> for Point {
    type Error = Error;
    fn try_from(v: Vec<i32>) -> Result<Point> {
        Point::new(&v)
    }
}

impl From<Point> for Vec<i32> {
    fn from(p: Point) -> Vec<i32> {
        p.coords().to_vec()
    }
}

/// All points of Z^d with Euclidean norm at most `radius`, sorted.
pub fn ball_points(dim: usize, radius: u32) -> Vec<Point> {
    let r = radius as i32;
    let r2 = (radius as i64) * (radius as i64);
    let mut out = Vec::new();
    for_each_in_box(dim, &vec![-r; dim], &vec![r; dim], |p| {
        if p.norm2() <= r2 {
            out.push(p);
        }
    });
    out.sort();
    out
}

/// Calls `f` on every point of the box `lo..=hi` (coordinate-wise).
pub fn for_each_in_box(dim: usize, lo: &[i32], hi: &[i32], mut f: impl FnMut(Point)) {
    if (0..dim).any(|a| lo[a] > hi[a]) {
        return;
    }
    let mut cur = Point::new(lo).expect("valid dimension");
    loop {
        f(cur);
        let mut axis = 0;
        loop {
            if axis == dim {
                return;
            }
            if cur.coords[axis] < hi[axis] {
                cur.coords[axis] += 1;
                break;
            }
            cur.coords[axis] = lo[axis];
            axis += 1;
        }
    }
}
