//! Named channels used throughout the tests, examples and CLI fixtures.

use super::StateChannel;
use crate::error::{Error, Result};

/// Noiseless stateless channel on `size` symbols.
pub fn identity(size: usize) -> StateChannel {
    let mut probs = vec![0.0; size * size];
    for x in 0..size {
        probs[x * size + x] = 1.0;
    }
    StateChannel::from_tensor(size, size, 1, probs).expect("identity is stochastic")
}

pub fn bsc(crossover: f64) -> Result<StateChannel> {
    compound_bsc(&[crossover])
}

/// One binary symmetric channel per state.
pub fn compound_bsc(crossovers: &[f64]) -> Result<StateChannel> {
    if crossovers.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter("crossover probabilities must lie in [0, 1]".into()));
    }
    StateChannel::from_fn(2, 2, crossovers.len(), |s, x, y| if x == y { 1.0 - crossovers[s] } else { crossovers[s] })
}

/// Z-channel: input 0 is received cleanly, input 1 falls to 0 with probability `fall`.
pub fn z_channel(fall: f64) -> Result<StateChannel> {
    opposite_z(1, fall).and_then(|ch| ch.fix_state(0))
}

/// Two-state "opposite Z" compound channel on `2·group` symbols.
///
/// Inputs split into a low group `0..group` and a high group. In state 0 the
/// low group passes cleanly while each high input is replaced, with
/// probability `fall`, by a uniform symbol of the low group. State 1 swaps
/// the roles. `group = 1` is the classic pair of mirrored Z-channels.
pub fn opposite_z(group: usize, fall: f64) -> Result<StateChannel> {
    if group == 0 || !(0.0..=1.0).contains(&fall) {
        return Err(Error::InvalidParameter("opposite_z needs group ≥ 1 and fall in [0, 1]".into()));
    }
    let size = 2 * group;
    StateChannel::from_fn(size, size, 2, |s, x, y| {
        let clean_group = s; // 0: low group clean, 1: high group clean
        let in_group = |v: usize| v / group;
        if in_group(x) == clean_group {
            return if x == y { 1.0 } else { 0.0 };
        }
        let mut p = if x == y { 1.0 - fall } else { 0.0 };
        if in_group(y) == clean_group {
            p += fall / group as f64;
        }
        p
    })
}

/// Binary adder AVC: `y = x + s` with `x, s ∈ {0,1}` and `y ∈ {0,1,2}`.
pub fn adder_avc() -> StateChannel {
    StateChannel::from_fn(2, 3, 2, |s, x, y| if y == x + s { 1.0 } else { 0.0 }).expect("adder is stochastic")
}

/// Binary additive AVC: `y = x ⊕ s`.
pub fn binary_additive_avc() -> StateChannel {
    StateChannel::from_fn(2, 2, 2, |s, x, y| if y == x ^ s { 1.0 } else { 0.0 }).expect("xor is stochastic")
}

/// Stateless channel whose rows all equal `row`.
pub fn constant_rows(inputs: usize, row: &[f64]) -> Result<StateChannel> {
    let probs = (0..inputs).flat_map(|_| row.iter().copied()).collect();
    StateChannel::new(inputs, row.len(), 1, probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opposite_z_group_one_is_mirrored_z_pair() {
        let ch = opposite_z(1, 0.5).unwrap();
        assert_eq!(ch.row(0, 0), &[1.0, 0.0]);
        assert_eq!(ch.row(0, 1), &[0.5, 0.5]);
        assert_eq!(ch.row(1, 1), &[0.0, 1.0]);
        assert_eq!(ch.row(1, 0), &[0.5, 0.5]);
    }

    #[test]
    fn opposite_z_groups() {
        let ch = opposite_z(2, 1.0).unwrap();
        assert_eq!(ch.row(0, 1), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ch.row(0, 3), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(ch.row(1, 0), &[0.0, 0.0, 0.5, 0.5]);
        assert_eq!(ch.row(1, 2), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn avc_shapes() {
        let a = adder_avc();
        assert_eq!((a.inputs(), a.outputs(), a.states()), (2, 3, 2));
        assert_eq!(a.row(1, 1), &[0.0, 0.0, 1.0]);
        let b = binary_additive_avc();
        assert_eq!(b.row(1, 0), &[0.0, 1.0]);
    }
}
