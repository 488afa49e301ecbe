//! Deterministic per-argument random streams, so parallel sweeps draw the
//! same inputs regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A generator keyed by the run seed, a per-check tag and the argument tuple.
pub fn argument_rng(seed: u64, tag: &str, args: &[usize]) -> ChaCha8Rng {
    let mut h = mix(seed);
    for b in tag.bytes() {
        h = mix(h ^ u64::from(b));
    }
    for &a in args {
        h = mix(h ^ a as u64);
    }
    ChaCha8Rng::seed_from_u64(h)
}
