//! State-choosing adversaries.
//!
//! No strategy sees the message or private randomness. Per-symbol rules see
//! only public information: the time index and the states already chosen.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::sample_categorical;
use crate::probcore::Distribution;

/// `(t, past states) → state`.
pub type SymbolRule = Arc<dyn Fn(usize, &[usize]) -> usize + Send + Sync>;

#[derive(Clone)]
pub enum AdversaryStrategy {
    ConstantState(usize),
    IidState(Distribution),
    PerSymbolRule(SymbolRule),
    /// Symmetrize against a codeword of codebook `target_codebook`.
    Spoofing { target_codebook: usize },
}

impl fmt::Debug for AdversaryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ConstantState(s) => write!(f, "ConstantState({s})"),
            Self::IidState(d) => write!(f, "IidState({:?})", d.probs()),
            Self::PerSymbolRule(_) => f.write_str("PerSymbolRule(..)"),
            Self::Spoofing { target_codebook } => write!(f, "Spoofing {{ target_codebook: {target_codebook} }}"),
        }
    }
}

impl AdversaryStrategy {
    /// Largest state index the strategy can emit, when known up front.
    pub(crate) fn max_state(&self) -> Option<usize> {
        match self {
            Self::ConstantState(s) => Some(*s),
            Self::IidState(d) => Some(d.len().saturating_sub(1)),
            _ => None,
        }
    }

    /// A state sequence for strategies that do not look at a codebook.
    pub(crate) fn blind_states<R: Rng + ?Sized>(&self, n: usize, states: usize, rng: &mut R) -> Vec<usize> {
        match self {
            Self::ConstantState(s) => vec![*s; n],
            Self::IidState(d) => (0..n).map(|_| sample_categorical(rng, d.probs())).collect(),
            Self::PerSymbolRule(rule) => {
                let mut out = Vec::with_capacity(n);
                for t in 0..n {
                    let s = rule(t, &out);
                    out.push(s.min(states - 1));
                }
                out
            }
            Self::Spoofing { .. } => unreachable!("spoofing needs a reference codeword"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn rules_see_past_states() {
        let alternate: SymbolRule = Arc::new(|t, past| if t == 0 { 0 } else { 1 - past[t - 1] });
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let s = AdversaryStrategy::PerSymbolRule(alternate).blind_states(5, 2, &mut rng);
        assert_eq!(s, vec![0, 1, 0, 1, 0]);
        assert_eq!(AdversaryStrategy::ConstantState(1).blind_states(3, 2, &mut rng), vec![1, 1, 1]);
    }
}
