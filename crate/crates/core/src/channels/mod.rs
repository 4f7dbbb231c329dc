//! Channels with state: `p(y|x,s)` on finite alphabets.
//!
//! A [`StateChannel`] stores a dense tensor indexed `[s][x][y]`. Products
//! remember how their output alphabet factors so that output coordinates
//! can later be summed out with [`StateChannel::marginalize_output`].

pub mod catalog;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probcore::{ChannelMatrix, Distribution, PROB_TOL};

/// Alphabet and tensor caps applied at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelLimits {
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_states: usize,
    /// Cap on `|X|·|Y|·|S|` for products.
    pub max_entries: usize,
}

impl Default for ChannelLimits {
    fn default() -> Self {
        Self { max_inputs: 64, max_outputs: 64, max_states: 16, max_entries: 10_000_000 }
    }
}

/// Which adversary model a state alphabet is read under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateModelTag {
    /// Compound channel: one state for the whole block.
    Cc,
    /// Arbitrarily varying channel: a state per symbol.
    Avc,
    /// No state.
    None,
}

impl std::fmt::Display for StateModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateModelTag::Cc => "cc",
            StateModelTag::Avc => "avc",
            StateModelTag::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateChannel {
    inputs: usize,
    outputs: usize,
    states: usize,
    probs: Vec<f64>,
    output_factors: Vec<usize>,
    nominal_rate: Option<f64>,
}

impl StateChannel {
    /// Builds a channel from a flat `[s][x][y]` tensor under the default limits.
    pub fn new(inputs: usize, outputs: usize, states: usize, probs: Vec<f64>) -> Result<Self> {
        Self::with_limits(inputs, outputs, states, probs, &ChannelLimits::default())
    }

    pub fn with_limits(
        inputs: usize,
        outputs: usize,
        states: usize,
        probs: Vec<f64>,
        limits: &ChannelLimits,
    ) -> Result<Self> {
        if inputs == 0 || outputs == 0 || states == 0 {
            return Err(Error::InvalidChannel("alphabets must be nonempty".into()));
        }
        for (what, size, cap) in [
            ("input alphabet", inputs, limits.max_inputs),
            ("output alphabet", outputs, limits.max_outputs),
            ("state alphabet", states, limits.max_states),
        ] {
            if size > cap {
                return Err(Error::SizeExceeded { what: what.into(), needed: size, cap });
            }
        }
        let ch = Self::from_tensor(inputs, outputs, states, probs)?;
        Ok(ch)
    }

    /// Validation without the per-alphabet caps (products and bit-pipes).
    fn from_tensor(inputs: usize, outputs: usize, states: usize, mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() != inputs * outputs * states {
            return Err(Error::DimensionMismatch(format!(
                "{states}x{inputs}x{outputs} tensor given {} entries",
                probs.len()
            )));
        }
        for (i, row) in probs.chunks_mut(outputs).enumerate() {
            let (s, x) = (i / inputs, i % inputs);
            if row.iter().any(|p| !p.is_finite() || *p < -PROB_TOL) {
                return Err(Error::InvalidChannel(format!("row (s={s}, x={x}) has an invalid entry")));
            }
            row.iter_mut().for_each(|p| *p = p.max(0.0));
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidChannel(format!("row (s={s}, x={x}) sums to {total}")));
            }
            // Stochastic up to rounding: kept verbatim.
            if (total - 1.0).abs() > 1e-12 {
                row.iter_mut().for_each(|p| *p /= total);
            }
        }
        Ok(Self { inputs, outputs, states, probs, output_factors: vec![outputs], nominal_rate: None })
    }

    /// Builds from nested `[s][x][y]` vectors.
    pub fn from_nested(tensor: &[Vec<Vec<f64>>]) -> Result<Self> {
        let states = tensor.len();
        let inputs = tensor.first().map_or(0, Vec::len);
        let outputs = tensor.first().and_then(|m| m.first()).map_or(0, Vec::len);
        let mut probs = Vec::with_capacity(states * inputs * outputs);
        for (s, matrix) in tensor.iter().enumerate() {
            if matrix.len() != inputs {
                return Err(Error::DimensionMismatch(format!("state {s} has {} rows, expected {inputs}", matrix.len())));
            }
            for (x, row) in matrix.iter().enumerate() {
                if row.len() != outputs {
                    return Err(Error::DimensionMismatch(format!(
                        "row (s={s}, x={x}) has {} entries, expected {outputs}",
                        row.len()
                    )));
                }
                probs.extend_from_slice(row);
            }
        }
        Self::new(inputs, outputs, states, probs)
    }

    /// Stateless channel from its rows `p(y|x)`.
    pub fn stateless(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_nested(std::slice::from_ref(&rows.to_vec()))
    }

    /// Builds `p(y|x,s) = f(s, x, y)`.
    pub fn from_fn(inputs: usize, outputs: usize, states: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut probs = Vec::with_capacity(states * inputs * outputs);
        for s in 0..states {
            for x in 0..inputs {
                for y in 0..outputs {
                    probs.push(f(s, x, y));
                }
            }
        }
        Self::new(inputs, outputs, states, probs)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn is_stateless(&self) -> bool {
        self.states == 1
    }

    pub fn output_factors(&self) -> &[usize] {
        &self.output_factors
    }

    /// Real-valued rate carried by bit-pipes.
    pub fn nominal_rate(&self) -> Option<f64> {
        self.nominal_rate
    }

    pub fn prob(&self, s: usize, x: usize, y: usize) -> f64 {
        self.probs[(s * self.inputs + x) * self.outputs + y]
    }

    pub fn row(&self, s: usize, x: usize) -> &[f64] {
        let start = (s * self.inputs + x) * self.outputs;
        &self.probs[start..start + self.outputs]
    }

    /// The `p(y|x)` matrix for state `s`.
    pub fn slice(&self, s: usize) -> ChannelMatrix<'_> {
        let block = self.inputs * self.outputs;
        ChannelMatrix::from_parts_unchecked(self.inputs, self.outputs, &self.probs[s * block..(s + 1) * block])
    }

    pub fn tensor(&self) -> &[f64] {
        &self.probs
    }

    /// Nested `[s][x][y]` copy of the tensor.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.states)
            .map(|s| (0..self.inputs).map(|x| self.row(s, x).to_vec()).collect())
            .collect()
    }

    /// `p(y|x) = p(y|x,s)`.
    pub fn fix_state(&self, s: usize) -> Result<StateChannel> {
        if s >= self.states {
            return Err(Error::IndexOutOfRange { index: s, size: self.states });
        }
        Ok(StateChannel {
            inputs: self.inputs,
            outputs: self.outputs,
            states: 1,
            probs: self.slice(s).data().to_vec(),
            output_factors: self.output_factors.clone(),
            nominal_rate: self.nominal_rate,
        })
    }

    /// `p(y|x) = Σ_s ps(s) p(y|x,s)`.
    pub fn mix_state(&self, ps: &Distribution) -> Result<StateChannel> {
        if ps.len() != self.states {
            return Err(Error::AlphabetMismatch { expected: self.states, actual: ps.len() });
        }
        Ok(StateChannel {
            inputs: self.inputs,
            outputs: self.outputs,
            states: 1,
            probs: self.mixture_rows(ps.probs()),
            output_factors: self.output_factors.clone(),
            nominal_rate: None,
        })
    }

    /// Flat `[x][y]` mixture for raw weights; callers guarantee a valid simplex point.
    pub(crate) fn mixture_rows(&self, weights: &[f64]) -> Vec<f64> {
        let block = self.inputs * self.outputs;
        let mut out = vec![0.0; block];
        for (s, w) in weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            out.iter_mut().zip(&self.probs[s * block..(s + 1) * block]).for_each(|(o, p)| *o += w * p);
        }
        out
    }

    /// Product channel under the default tensor cap.
    pub fn product(&self, other: &StateChannel) -> Result<StateChannel> {
        self.product_with_cap(other, ChannelLimits::default().max_entries)
    }

    /// Independent product: alphabets multiply, first factor most significant.
    pub fn product_with_cap(&self, other: &StateChannel, max_entries: usize) -> Result<StateChannel> {
        let inputs = self.inputs * other.inputs;
        let outputs = self.outputs * other.outputs;
        let states = self.states * other.states;
        let needed = inputs.saturating_mul(outputs).saturating_mul(states);
        if needed > max_entries {
            return Err(Error::SizeExceeded { what: "product channel tensor".into(), needed, cap: max_entries });
        }
        let mut probs = Vec::with_capacity(needed);
        for s1 in 0..self.states {
            for s2 in 0..other.states {
                for x1 in 0..self.inputs {
                    for x2 in 0..other.inputs {
                        let (r1, r2) = (self.row(s1, x1), other.row(s2, x2));
                        for p1 in r1 {
                            probs.extend(r2.iter().map(|p2| p1 * p2));
                        }
                    }
                }
            }
        }
        let mut output_factors = self.output_factors.clone();
        output_factors.extend_from_slice(&other.output_factors);
        Ok(StateChannel { inputs, outputs, states, probs, output_factors, nominal_rate: None })
    }

    /// Sums `p` over every output factor not listed in `keep`.
    pub fn marginalize_output(&self, keep: &[usize]) -> Result<StateChannel> {
        let factors = &self.output_factors;
        for &k in keep {
            if k >= factors.len() {
                return Err(Error::UnknownFactor { factor: k, factors: factors.len() });
            }
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let kept_factors: Vec<usize> = kept.iter().map(|&k| factors[k]).collect();
        let outputs: usize = kept_factors.iter().product();

        // Map each full output index to its index in the kept coordinates.
        let mut target = vec![0usize; self.outputs];
        let mut digits = vec![0usize; factors.len()];
        for t in target.iter_mut() {
            let mut idx = 0;
            for &k in &kept {
                idx = idx * factors[k] + digits[k];
            }
            *t = idx;
            for pos in (0..factors.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < factors[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }

        let mut probs = vec![0.0; self.states * self.inputs * outputs];
        for s in 0..self.states {
            for x in 0..self.inputs {
                let base = (s * self.inputs + x) * outputs;
                for (y, p) in self.row(s, x).iter().enumerate() {
                    probs[base + target[y]] += p;
                }
            }
        }
        Ok(StateChannel {
            inputs: self.inputs,
            outputs,
            states: self.states,
            probs,
            output_factors: if kept_factors.is_empty() { vec![1] } else { kept_factors },
            nominal_rate: None,
        })
    }

    /// True when the rows of slice `s` are pairwise equal within `tol`.
    pub fn rows_equal_in_state(&self, s: usize, tol: f64) -> bool {
        !self.slice(s).rows_distinct(tol)
    }

    /// True when every state slice has identical rows (zero capacity in every sense).
    pub fn is_degenerate(&self, tol: f64) -> bool {
        (0..self.states).all(|s| self.rows_equal_in_state(s, tol))
    }

    /// True when slices `a` and `b` agree entrywise exactly.
    pub fn states_identical(&self, a: usize, b: usize) -> bool {
        self.slice(a).data() == self.slice(b).data()
    }
}

/// Largest alphabet a bit-pipe is expanded to.
pub const BIT_PIPE_MAX_BITS: u32 = 6;

/// Noiseless stateless identity on `2^⌊n·rate⌋` symbols, tagged with `rate`.
pub fn bit_pipe(rate: f64, granularity: u32) -> Result<StateChannel> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("bit-pipe rate must be nonnegative, got {rate}")));
    }
    let bits = (granularity as f64 * rate + 1e-12).floor();
    if bits > BIT_PIPE_MAX_BITS as f64 {
        return Err(Error::SizeExceeded {
            what: "bit-pipe alphabet (bits)".into(),
            needed: bits as usize,
            cap: BIT_PIPE_MAX_BITS as usize,
        });
    }
    let size = 1usize << bits as u32;
    let mut ch = catalog::identity(size);
    ch.nominal_rate = Some(rate);
    Ok(ch)
}

/// Representation used by reachability: binary identity when `rate > 0`,
/// a single-symbol channel otherwise.
pub fn bit_pipe_for_reachability(rate: f64) -> Result<StateChannel> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("bit-pipe rate must be nonnegative, got {rate}")));
    }
    let mut ch = catalog::identity(if rate > 0.0 { 2 } else { 1 });
    ch.nominal_rate = Some(rate);
    Ok(ch)
}
