//! Seeded Monte Carlo experiments.
//!
//! Every trial draws from its own ChaCha8 stream: the master seed selects
//! the key, the trial index selects the stream, and each independent purpose
//! within a trial (codebook draws, shared randomness) starts at its own
//! block offset. Reports therefore depend only on `(seed, trials)` and not
//! on thread scheduling.

mod adversary;
mod avc;
mod coding;
mod feedback;
pub mod gf2q;
mod hash;
mod training;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use adversary::{AdversaryStrategy, SymbolRule};
pub use avc::{run_avc_common_randomness_experiment, seeds_required, AvcExperiment, AvcReport};
pub use coding::{success_probability, ScoreDistribution, DEFAULT_SUPPORT_CAP, SCORE_QUANTUM_BITS};
pub use feedback::{run_cc_feedback_protocol, FeedbackExperiment, FeedbackReport};
pub use gf2q::{Gf2q, Gf2qElement};
pub use hash::{run_hash_protocol, HashExperiment, HashReport, ListOracle};
pub use training::{equivalent_states, run_training_estimator};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_985;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    pub failures: u64,
    pub error_rate: f64,
    pub seed: u64,
    pub wilson_upper_95: f64,
}

impl TrialReport {
    pub fn from_counts(trials: u64, failures: u64, seed: u64) -> Self {
        let error_rate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        Self { trials, failures, error_rate, seed, wilson_upper_95: wilson_upper_95(failures, trials) }
    }

    /// Flat `key: value` block.
    pub fn to_kv(&self) -> String {
        format!(
            "trials: {}\nfailures: {}\nerror_rate: {:.6}\nwilson_upper_95: {:.6}\nseed: {}\n",
            self.trials, self.failures, self.error_rate, self.wilson_upper_95, self.seed
        )
    }
}

/// Upper end of the Wilson score interval at 95% confidence.
pub fn wilson_upper_95(failures: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z_95 * Z_95;
    let center = p + z2 / (2.0 * n);
    let spread = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center + spread) / (1.0 + z2 / n)).clamp(p, 1.0)
}

/// Offsets of independent draws inside a trial's stream.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Purpose {
    Main = 0,
    SharedSeed = 1,
}

/// The RNG for `(seed, trial, purpose)`.
pub(crate) fn trial_rng(seed: u64, trial: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos((purpose as u128) << 64);
    rng
}

/// Runs `trials` independent trials in parallel and counts failures.
pub(crate) fn count_failures<F>(trials: u64, f: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    (0..trials).into_par_iter().filter(|&t| f(t)).count() as u64
}

/// Like [`count_failures`] for trials that can fail outright.
pub(crate) fn try_count_failures<F>(trials: u64, f: F) -> crate::error::Result<u64>
where
    F: Fn(u64) -> crate::error::Result<bool> + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(f)
        .try_fold(|| 0u64, |acc, r| r.map(|fail| acc + fail as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Draws an index from a probability vector by inversion.
pub(crate) fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}
