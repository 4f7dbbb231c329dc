//! Three-session CC protocol: training, state feedback, then coding for the
//! estimated state.
//!
//! Session 2 is taken to be error free. With feedback off, the code is
//! designed for the state of smallest capacity `s⋆`.

use rand::Rng;
use serde::Serialize;

use super::coding::{competitor_law, competitors, success_probability, Metric, DEFAULT_SUPPORT_CAP, MAX_MESSAGE_BITS};
use super::training::{estimate, log_table};
use super::{sample_categorical, try_count_failures, trial_rng, Purpose, TrialReport};
use crate::capacity::{ba_capacity, compound_capacity_upper, SolverConfig, StateOptimizer};
use crate::channels::StateChannel;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeedbackExperiment {
    pub rate: f64,
    /// Training length.
    pub n1: usize,
    /// Feedback session length (idealized; recorded only).
    pub n2: usize,
    /// Coding blocklength.
    pub n3: usize,
    pub true_state: usize,
    pub feedback: bool,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeedbackReport {
    pub report: TrialReport,
    pub message_bits: u32,
    /// State the code is designed for when feedback is off.
    pub worst_state: usize,
    /// Trials whose estimate missed the true state's slice.
    pub estimate_mismatches: u64,
}

struct Design {
    input: Vec<f64>,
    metric: Metric,
}

pub fn run_cc_feedback_protocol(ch: &StateChannel, exp: &FeedbackExperiment) -> Result<FeedbackReport> {
    if exp.true_state >= ch.states() {
        return Err(Error::IndexOutOfRange { index: exp.true_state, size: ch.states() });
    }
    if !(exp.rate >= 0.0) || exp.n3 == 0 || (exp.feedback && exp.n1 == 0) {
        return Err(Error::InvalidParameter("need rate ≥ 0, n3 ≥ 1 and, with feedback, n1 ≥ 1".into()));
    }
    let bits = (exp.n3 as f64 * exp.rate + 1e-9).floor() as u32;
    if bits > MAX_MESSAGE_BITS {
        return Err(Error::SizeExceeded { what: "message bits".into(), needed: bits as usize, cap: MAX_MESSAGE_BITS as usize });
    }
    let cfg = SolverConfig::default();
    let worst_state = match compound_capacity_upper(ch, &cfg)?.optimizer_state {
        Some(StateOptimizer::Index(s)) => s,
        _ => 0,
    };
    let designs: Vec<Design> = (0..ch.states())
        .map(|s| {
            let fixed = ch.fix_state(s)?;
            let input = ba_capacity(&fixed, &cfg)?.optimizer_input.probs().to_vec();
            Ok(Design { input, metric: Metric::new(ch.inputs(), ch.outputs(), fixed.tensor()) })
        })
        .collect::<Result<_>>()?;
    let logs = log_table(ch);
    let n_competitors = competitors(bits);
    let truth = super::training::equivalent_states(ch, exp.true_state);

    let mismatches = std::sync::atomic::AtomicU64::new(0);
    let failures = try_count_failures(exp.trials, |t| {
        let mut rng = trial_rng(exp.seed, t, Purpose::Main);
        let estimate = if exp.feedback {
            estimate(ch, &logs, exp.true_state, exp.n1, &mut rng)[0]
        } else {
            worst_state
        };
        if !truth.contains(&estimate) {
            mismatches.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        let design = &designs[estimate];
        let x: Vec<usize> = (0..exp.n3).map(|_| sample_categorical(&mut rng, &design.input)).collect();
        let y: Vec<usize> = x.iter().map(|&xi| sample_categorical(&mut rng, ch.row(exp.true_state, xi))).collect();
        let u: f64 = rng.gen();
        decode_fails(&design.metric, &design.input, &x, &y, ch.outputs(), n_competitors, None, u)
    })?;
    Ok(FeedbackReport {
        report: TrialReport::from_counts(exp.trials, failures, exp.seed),
        message_bits: bits,
        worst_state,
        estimate_mismatches: mismatches.into_inner(),
    })
}

/// Decoding outcome for one trial. `explicit` is the score of one competitor
/// that is not independent of the output, if any; it is counted in `n`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn decode_fails(
    metric: &Metric,
    input: &[f64],
    x: &[usize],
    y: &[usize],
    outputs: usize,
    n: f64,
    explicit: Option<Option<i64>>,
    u: f64,
) -> Result<bool> {
    if n <= 0.0 {
        return Ok(false);
    }
    let sent = metric.score(x, y);
    let mut ties = 0;
    let mut independent = n;
    if let Some(other) = explicit {
        independent -= 1.0;
        if other > sent {
            return Ok(true);
        }
        if other == sent {
            ties = 1;
        }
    }
    let mut counts = vec![0usize; outputs];
    y.iter().for_each(|&v| counts[v] += 1);
    let law = competitor_law(metric, input, &counts, DEFAULT_SUPPORT_CAP)?;
    let (gt, eq) = law.tail(sent);
    Ok(u >= success_probability(independent, gt, eq, ties))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::catalog::*;

    #[test]
    fn zero_rate_never_fails() {
        let ch = opposite_z(2, 1.0).unwrap();
        let exp = FeedbackExperiment { rate: 0.0, n1: 20, n2: 1, n3: 50, true_state: 1, feedback: true, trials: 50, seed: 1 };
        assert_eq!(run_cc_feedback_protocol(&ch, &exp).unwrap().report.failures, 0);
    }
}
