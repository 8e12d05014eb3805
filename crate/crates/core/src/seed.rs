//! Deterministic seed derivation.
//!
//! Every randomized operation owns a labeled substream derived from a master
//! seed, so adding or reordering random draws in one part of a pipeline never
//! shifts the stream seen by another.  The derivation is
//! `splitmix64(master ^ fnv1a64(label))`: FNV-1a hashes the label, splitmix64
//! scrambles the combination so that nearby master seeds give unrelated
//! substreams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a hash of a byte string.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// splitmix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the sub-seed for a labeled random stream.
pub fn subseed(master: u64, label: &str) -> u64 {
    splitmix64(master ^ fnv1a64(label.as_bytes()))
}

/// Seeded generator for a labeled stream.  ChaCha8 is used everywhere in the
/// crate: it is fast, high quality, and its output is stable across
/// platforms and library versions.
pub fn rng(master: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(subseed(master, label))
}
