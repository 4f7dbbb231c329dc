//! Maximum-likelihood state estimation from a public training sequence.

use rand::Rng;

use super::{count_failures, sample_categorical, trial_rng, Purpose, TrialReport};
use crate::channels::StateChannel;
use crate::error::{Error, Result};

/// States whose slices equal slice `s` exactly.
pub fn equivalent_states(ch: &StateChannel, s: usize) -> Vec<usize> {
    (0..ch.states()).filter(|&t| ch.states_identical(s, t)).collect()
}

/// Log-likelihood table `[s][x][y]`, `−∞` for impossible outputs.
pub(crate) fn log_table(ch: &StateChannel) -> Vec<f64> {
    ch.tensor().iter().map(|p| if *p > 0.0 { p.log2() } else { f64::NEG_INFINITY }).collect()
}

/// Draws a uniform training input, the output under `true_state`, and
/// returns the set of maximizing states.
pub(crate) fn estimate<R: Rng + ?Sized>(ch: &StateChannel, logs: &[f64], true_state: usize, n: usize, rng: &mut R) -> Vec<usize> {
    let (nx, ny, ns) = (ch.inputs(), ch.outputs(), ch.states());
    let mut ll = vec![0.0f64; ns];
    for _ in 0..n {
        let x = rng.gen_range(0..nx);
        let y = sample_categorical(rng, ch.row(true_state, x));
        for (s, l) in ll.iter_mut().enumerate() {
            *l += logs[(s * nx + x) * ny + y];
        }
    }
    let best = ll.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..ns).filter(|&s| ll[s] == best).collect()
}

/// Fraction of trials where the argmax set differs from the set of states
/// indistinguishable from `true_state`.
pub fn run_training_estimator(ch: &StateChannel, true_state: usize, n: usize, trials: u64, seed: u64) -> Result<TrialReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("training length must be at least 1".into()));
    }
    if true_state >= ch.states() {
        return Err(Error::IndexOutOfRange { index: true_state, size: ch.states() });
    }
    let target = equivalent_states(ch, true_state);
    let logs = log_table(ch);
    let failures = count_failures(trials, |t| {
        let mut rng = trial_rng(seed, t, Purpose::Main);
        estimate(ch, &logs, true_state, n, &mut rng) != target
    });
    Ok(TrialReport::from_counts(trials, failures, seed))
}
