use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic substream generator.
///
/// All randomness in the crate flows through counter-based ChaCha streams:
/// the master seed fixes the key and the (hashed) id path selects the
/// stream, so trials and grid cells can run in any order, or in parallel,
/// and still reproduce bit-identically.
pub fn substream(master_seed: u64, ids: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    // FNV-1a over the id path
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &id in ids {
        h ^= id;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    rng.set_stream(h);
    rng
}
