//! Splittable, counter-based random streams.
//!
//! A [`StreamKey`] is a 64-bit key derived from the master seed by folding in
//! labels such as the sample size and replication index. Each key expands into
//! a ChaCha12 key, and each [`Role`] selects one of ChaCha's independent
//! 2⁶⁴ streams, so draws for one replication never depend on how many other
//! replications exist or on the order they are evaluated in.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Purpose of a stream within one simulated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Xi = 1,
    Errors = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        StreamKey(splitmix64(&mut s))
    }

    /// Child key for `label`; distinct labels give unrelated keys.
    pub fn derive(self, label: u64) -> Self {
        let mut l = label;
        let mut s = self.0 ^ splitmix64(&mut l);
        StreamKey(splitmix64(&mut s))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self, role: Role) -> ChaCha12Rng {
        let mut s = self.0;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(role as u64);
        rng
    }
}

/// Key of replication `rep` at sample size `n` under master `seed`.
pub fn replication_key(seed: u64, n: usize, rep: usize) -> StreamKey {
    StreamKey::new(seed).derive(n as u64).derive(rep as u64)
}
