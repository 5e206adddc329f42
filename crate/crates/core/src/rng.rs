use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded, splittable source of randomness.
///
/// Children are derived from `(seed, stream)` alone, so work that is handed out to threads
/// draws the same numbers no matter how it is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child source for the given stream id.
    pub fn split(&self, stream: u64) -> RandomSource {
        let mixed = splitmix64(self.seed ^ splitmix64(stream.wrapping_add(0x6a09_e667_f3bc_c909)));
        RandomSource { seed: mixed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(RandomSource::new(7).rng(), |r, _| Some(r.random())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(RandomSource::new(7).rng(), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn splits_differ() {
        let root = RandomSource::new(1);
        assert_ne!(root.split(0), root.split(1));
        assert_ne!(root.split(0), root);
        assert_eq!(root.split(3), RandomSource::new(1).split(3));
    }
}
