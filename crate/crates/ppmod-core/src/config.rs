use serde::{Deserialize, Serialize};

/// Run-wide configuration knobs.
///
/// All searches that use pseudo-randomness derive their streams from `seed`,
/// so a fixed config yields byte-identical results run over run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunConfig {
    /// Largest group order accepted by group construction.
    pub max_order: usize,
    /// Largest module dimension accepted by module construction.
    pub max_dim: usize,
    /// Seed for the deterministic fallback searches in splitting and
    /// isomorphism testing.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_order: 512,
            max_dim: 600,
            seed: 1,
        }
    }
}

/// Tiny deterministic RNG (splitmix64) for the seeded fallback searches.
///
/// Not cryptographic; chosen because the stream is stable across platforms
/// and there is no reason to pull in a full RNG crate for a fallback probe
/// sequence.
#[derive(Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = SplitMix64::new(43);
        assert_ne!(a.next_u64(), c.next_u64());
    }
}
