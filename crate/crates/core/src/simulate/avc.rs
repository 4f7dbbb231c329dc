//! Symmetrizing attack against a deterministic code versus a code chosen
//! by a shared random seed.
//!
//! Both arms share each trial's draws: the sent codeword, the adversary's
//! reference codeword and the channel output. The deterministic arm always
//! faces the attacked codebook. The shared arm draws `L ∈ [K]` from its own
//! stream and is attacked only when `L` hits the adversary's target, so
//! `K = 1` reproduces the deterministic arm exactly.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::adversary::AdversaryStrategy;
use super::coding::{competitors, Metric, MAX_MESSAGE_BITS};
use super::feedback::decode_fails;
use super::{sample_categorical, trial_rng, Purpose, TrialReport};
use crate::capacity::{random_coding_capacity, SolverConfig, StateOptimizer};
use crate::channels::StateChannel;
use crate::error::{Error, Result};
use crate::symmetrizability::{is_symmetrizable, Witness};

#[derive(Clone, Debug)]
pub struct AvcExperiment {
    pub rate: f64,
    pub n: usize,
    /// Number of codebooks `K` the shared seed selects from.
    pub num_seeds: u64,
    /// Target error for the seed-count requirement.
    pub epsilon: f64,
    pub adversary: AdversaryStrategy,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvcReport {
    pub deterministic: TrialReport,
    pub shared: TrialReport,
    pub message_bits: u32,
    /// `⌈2n(R + log2|S|)/ε⌉`.
    pub seeds_required: f64,
    pub seeds_sufficient: bool,
    pub random_coding_capacity: f64,
}

/// `2n(R + log2|S|)/ε`.
pub fn seeds_required(n: usize, rate: f64, states: usize, epsilon: f64) -> f64 {
    2.0 * n as f64 * (rate + (states as f64).log2()) / epsilon
}

pub fn run_avc_common_randomness_experiment(ch: &StateChannel, exp: &AvcExperiment) -> Result<AvcReport> {
    if !(exp.rate >= 0.0) || exp.n == 0 || exp.num_seeds == 0 || !(exp.epsilon > 0.0) {
        return Err(Error::InvalidParameter("need rate ≥ 0, n ≥ 1, K ≥ 1 and ε > 0".into()));
    }
    if let Some(s) = exp.adversary.max_state() {
        if s >= ch.states() {
            return Err(Error::IndexOutOfRange { index: s, size: ch.states() });
        }
    }
    let bits = (exp.n as f64 * exp.rate + 1e-9).floor() as u32;
    if bits > MAX_MESSAGE_BITS {
        return Err(Error::SizeExceeded { what: "message bits".into(), needed: bits as usize, cap: MAX_MESSAGE_BITS as usize });
    }
    let witness: Option<Witness> = match exp.adversary {
        AdversaryStrategy::Spoofing { .. } => {
            let cert = is_symmetrizable(ch)?;
            Some(cert.witness.ok_or(Error::NotSymmetrizable)?)
        }
        _ => None,
    };
    let target = match exp.adversary {
        AdversaryStrategy::Spoofing { target_codebook } => target_codebook,
        _ => 0,
    };

    let cr = random_coding_capacity(ch, &SolverConfig::default())?;
    let input = cr.optimizer_input.probs().to_vec();
    let mixture = match &cr.optimizer_state {
        Some(StateOptimizer::Mixture(q)) => q.probs().to_vec(),
        _ => vec![1.0 / ch.states() as f64; ch.states()],
    };
    let metric = Metric::new(ch.inputs(), ch.outputs(), &ch.mixture_rows(&mixture));
    let n_comp = competitors(bits);

    let outcome = |t: u64| -> Result<(bool, bool)> {
        let mut rng = trial_rng(exp.seed, t, Purpose::Main);
        let x: Vec<usize> = (0..exp.n).map(|_| sample_categorical(&mut rng, &input)).collect();
        let (states, reference) = match &witness {
            Some(w) => {
                // The adversary knows the codebook, not the message.
                let hits_sent = rng.gen::<f64>() < 1.0 / (n_comp + 1.0);
                let other: Vec<usize> = (0..exp.n).map(|_| sample_categorical(&mut rng, &input)).collect();
                let reference = if hits_sent { x.clone() } else { other };
                let states = reference.iter().map(|&xr| sample_categorical(&mut rng, w.row(&[xr]).probs())).collect();
                (states, (!hits_sent).then_some(reference))
            }
            None => (exp.adversary.blind_states(exp.n, ch.states(), &mut rng), None),
        };
        let y: Vec<usize> =
            x.iter().zip(&states).map(|(&xi, &si)| sample_categorical(&mut rng, ch.row(si, xi))).collect();
        let u: f64 = rng.gen();
        let explicit = reference.as_ref().map(|r| metric.score(r, &y));
        let det = decode_fails(&metric, &input, &x, &y, ch.outputs(), n_comp, explicit, u)?;

        let l = trial_rng(exp.seed, t, Purpose::SharedSeed).gen_range(0..exp.num_seeds);
        let attacked = l == target as u64;
        let shared = if attacked || witness.is_none() {
            det
        } else {
            decode_fails(&metric, &input, &x, &y, ch.outputs(), n_comp, None, u)?
        };
        Ok((det, shared))
    };

    let outcomes: Vec<(bool, bool)> = (0..exp.trials).into_par_iter().map(outcome).collect::<Result<_>>()?;
    let det = outcomes.iter().filter(|o| o.0).count() as u64;
    let shared = outcomes.iter().filter(|o| o.1).count() as u64;
    let required = seeds_required(exp.n, exp.rate, ch.states(), exp.epsilon);
    Ok(AvcReport {
        deterministic: TrialReport::from_counts(exp.trials, det, exp.seed),
        shared: TrialReport::from_counts(exp.trials, shared, exp.seed),
        message_bits: bits,
        seeds_required: required.ceil(),
        seeds_sufficient: exp.num_seeds as f64 >= required,
        random_coding_capacity: cr.value,
    })
}
