//! Counter-based arrow generator.
//!
//! Arrow `i` (0-based) at a vertex with stack key `key` under seed `seed` is
//!
//! ```text
//! base = mix64(seed ^ mix64(key ^ KEY_SALT))
//! x    = mix64(base + (i + 1) * GAMMA)          (wrapping arithmetic)
//! dir  = floor(x * deg / 2^64)
//! ```
//!
//! where `mix64` is the SplitMix64 output function and `GAMMA` its golden-ratio
//! increment. `base` is the state of a SplitMix64 stream private to the vertex,
//! so `x` is the `(i+1)`-th output of that stream. The range reduction is the
//! multiply-high method; its bias is below `deg / 2^64`.

pub const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const KEY_SALT: u64 = 0x5851_f42d_4c95_7f2d;
const SEED_SALT: u64 = 0xd1b5_4a32_d192_ed03;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn stream_base(seed: u64, key: u64) -> u64 {
    mix64(seed ^ mix64(key ^ KEY_SALT))
}

#[inline]
pub fn stream_word(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

#[inline]
pub fn reduce(x: u64, deg: usize) -> usize {
    ((x as u128 * deg as u128) >> 64) as usize
}

/// Arrow `index` of the stack at `key`, as an edge index in `0..deg`.
#[inline]
pub fn arrow(seed: u64, key: u64, index: u64, deg: usize) -> usize {
    reduce(stream_word(stream_base(seed, key), index), deg)
}

/// Seed of sub-stream `stream` of a master seed (per-trial seeds etc.).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix64(mix64(master ^ SEED_SALT).wrapping_add(stream.wrapping_add(1).wrapping_mul(GAMMA)))
}
