/// Weyl increment of SplitMix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep`: the `rep`-th output of a SplitMix64 generator
/// started at `seed`. Depends only on `(seed, rep)`, so replications can run
/// in any order.
pub fn derive_rep_seed(seed: u64, rep: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(rep.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
