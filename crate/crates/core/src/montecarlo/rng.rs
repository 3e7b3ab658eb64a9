use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::profile::{Profile, VoteDistribution};

/// Generator for sample `index` of a run seeded with `seed`.
///
/// Each index gets its own ChaCha stream, so a sample does not depend on which
/// worker draws it or in what order.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sampler of i.i.d. voter profiles.
#[derive(Clone, Debug)]
pub struct ProfileSampler {
    m: usize,
    dist: WeightedIndex<f64>,
}

impl ProfileSampler {
    pub fn new(p: &VoteDistribution) -> Self {
        ProfileSampler {
            m: p.num_candidates().expect("validated distribution"),
            dist: WeightedIndex::new(p.p()).expect("positive weights"),
        }
    }

    pub fn sample(&self, n: usize, seed: u64, index: u64) -> Profile {
        let mut rng = stream_rng(seed, index);
        let votes = (0..n).map(|_| self.dist.sample(&mut rng)).collect();
        Profile::new(self.m, votes).expect("valid votes")
    }
}

/// `n` i.i.d. votes from `p`, determined by `(seed, index)`.
pub fn sample_profile(p: &VoteDistribution, n: usize, seed: u64, index: u64) -> Profile {
    ProfileSampler::new(p).sample(n, seed, index)
}
