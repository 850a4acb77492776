//! Reproducible parallel random streams.
//!
//! Every Monte Carlo run in the crate draws from ChaCha8, a counter-based
//! generator: its output block is a pure function of `(key, stream, counter)`.
//! A [`StreamKey`] names a key; [`StreamKey::child`] derives sub-keys with the
//! SplitMix64 finalizer so that independent parts of an experiment (axis
//! pairs, suites) never share a key. Trials are cut into fixed batches of
//! [`BATCH_SIZE`], batch `k` uses ChaCha stream `k`, and batch results are
//! merged in batch order. The output of a run therefore depends only on the
//! seed and the trial count, never on how batches were scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spin::{
    empirical_expectation, Axis, ExpectationEstimate, MeanAccumulator, Outcome, PairCounts,
};

/// Generator used for every simulated trial.
pub type StreamRng = ChaCha8Rng;

/// Trials per independently seeded batch.
pub const BATCH_SIZE: u64 = 1 << 16;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(seed)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// Sub-key for the `index`-th independent component of a run.
    pub fn child(self, index: u64) -> StreamKey {
        let salt = GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1));
        StreamKey(mix64(mix64(self.0) ^ salt))
    }

    /// Generator for stream `index` under this key.
    pub fn stream(self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

/// Runs `n` trials in batches of [`BATCH_SIZE`], one ChaCha stream per batch,
/// and returns the per-batch results in batch order.
///
/// `batch` receives the batch generator and the number of trials to run.
pub fn batched<T, F>(key: StreamKey, n: u64, batch: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> T + Sync,
{
    let batches = n.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|k| {
            let len = BATCH_SIZE.min(n - k * BATCH_SIZE);
            let mut rng = key.stream(k);
            batch(&mut rng, len)
        })
        .collect()
}

/// Tallies `n` outcome pairs produced by `trial`.
pub fn count_pairs<F>(key: StreamKey, n: u64, trial: F) -> PairCounts
where
    F: Fn(&mut StreamRng) -> (Outcome, Outcome) + Sync,
{
    batched(key, n, |rng, len| {
        let mut counts = PairCounts::default();
        for _ in 0..len {
            let (a, b) = trial(rng);
            counts.record(a, b);
        }
        counts
    })
    .into_iter()
    .sum()
}

/// Accumulates `n` samples of a real statistic, merged in batch order.
pub fn mean_of<F>(key: StreamKey, n: u64, sample: F) -> MeanAccumulator
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    batched(key, n, |rng, len| {
        let mut acc = MeanAccumulator::default();
        for _ in 0..len {
            acc.push(sample(rng));
        }
        acc
    })
    .into_iter()
    .fold(MeanAccumulator::default(), MeanAccumulator::merge)
}

/// Anything that produces one `(A1, B2)` outcome pair per simulated trial,
/// particle 1 measured along `a` and particle 2 along `b`.
pub trait PairSource: Sync {
    fn trial<R: Rng + ?Sized>(&self, rng: &mut R, a: Axis, b: Axis) -> (Outcome, Outcome);

    /// Counts over `n` trials, reproducible from `key`.
    fn counts(&self, key: StreamKey, a: Axis, b: Axis, n: u64) -> PairCounts {
        count_pairs(key, n, |rng| self.trial(rng, a, b))
    }

    /// Monte Carlo estimate of `E(a, b)`; `n` must be positive.
    fn expectation(&self, key: StreamKey, a: Axis, b: Axis, n: u64) -> ExpectationEstimate {
        assert!(n > 0, "expectation needs at least one trial");
        empirical_expectation(&self.counts(key, a, b, n)).expect("n > 0")
    }
}
