//! Counter-based random streams.
//!
//! Every random object (a code realization, a Monte Carlo trial) draws from
//! its own ChaCha stream selected by `(master_seed, index)`, so results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The stream for object `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, 3).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s0 = stream_rng(7, 0);
        let mut s1 = stream_rng(7, 1);
        let x: Vec<u32> = (0..8).map(|_| s0.random()).collect();
        let y: Vec<u32> = (0..8).map(|_| s1.random()).collect();
        assert_ne!(x, y);
        assert_ne!(stream_rng(8, 0).random::<u64>(), stream_rng(7, 0).random::<u64>());
    }
}
