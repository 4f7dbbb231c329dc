//! Probability vectors, entropy, divergence and mutual information.
//!
//! All quantities are in bits. The conventions `0·log 0 = 0` and
//! `p·log(p/0) = +∞` hold everywhere in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for probability-vector validity.
pub const PROB_TOL: f64 = 1e-9;

/// A probability vector on a finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `probs` and renormalizes it.
    ///
    /// Entries may undershoot zero and the total may miss one by at most
    /// [`PROB_TOL`]; anything further off is rejected.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("entry {i} is {p}")));
            }
            if *p < -PROB_TOL {
                return Err(Error::InvalidDistribution(format!("entry {i} is negative ({p})")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "uniform distribution needs a nonempty alphabet");
        Self { probs: vec![1.0 / size as f64; size] }
    }

    pub fn point_mass(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
        let mut probs = vec![0.0; size];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    /// Builds a distribution from nonnegative weights by normalizing them.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be nonnegative with positive sum".into()));
        }
        Ok(Self { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i)
    }

    /// Convex combination `weight·self + (1 − weight)·other`.
    pub fn mix(&self, other: &Distribution, weight: f64) -> Result<Distribution> {
        check_len(self.len(), other.len())?;
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| weight * a + (1.0 - weight) * b)
            .collect();
        Distribution::new(probs)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Distribution) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Distribution::new(probs)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

/// A joint distribution `p(x, y)` stored row-major by input symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows * cols != probs.len() || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} joint distribution given {} entries",
                probs.len()
            )));
        }
        // Reuse the vector validation, then restore the shape.
        let flat = Distribution::new(probs)?;
        Ok(Self { rows, cols, probs: flat.probs })
    }

    /// `p(x, y) = p(x) p(y|x)`.
    pub fn from_input_and_channel(input: &Distribution, channel: &ChannelMatrix<'_>) -> Result<Self> {
        check_len(channel.inputs(), input.len())?;
        let mut probs = Vec::with_capacity(channel.inputs() * channel.outputs());
        for (x, px) in input.probs().iter().enumerate() {
            probs.extend(channel.row(x).iter().map(|w| px * w));
        }
        Ok(Self { rows: channel.inputs(), cols: channel.outputs(), probs })
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.cols + y]
    }

    pub fn input_marginal(&self) -> Vec<f64> {
        self.probs.chunks(self.cols).map(|row| row.iter().sum()).collect()
    }

    pub fn output_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for row in self.probs.chunks(self.cols) {
            out.iter_mut().zip(row).for_each(|(o, p)| *o += p);
        }
        out
    }

    /// `I(X;Y) = H(X) + H(Y) − H(X,Y)`.
    pub fn mutual_information(&self) -> f64 {
        let mi = entropy_bits(&self.input_marginal()) + entropy_bits(&self.output_marginal())
            - entropy_bits(&self.probs);
        mi.max(0.0)
    }
}

/// Borrowed view of a row-stochastic matrix `p(y|x)`.
#[derive(Clone, Copy, Debug)]
pub struct ChannelMatrix<'a> {
    inputs: usize,
    outputs: usize,
    data: &'a [f64],
}

impl<'a> ChannelMatrix<'a> {
    pub fn new(inputs: usize, outputs: usize, data: &'a [f64]) -> Result<Self> {
        if inputs * outputs != data.len() || inputs == 0 || outputs == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{inputs}x{outputs} channel matrix given {} entries",
                data.len()
            )));
        }
        for (x, row) in data.chunks(outputs).enumerate() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidChannel(format!("row {x} is not a distribution")));
            }
        }
        Ok(Self { inputs, outputs, data })
    }

    pub(crate) fn from_parts_unchecked(inputs: usize, outputs: usize, data: &'a [f64]) -> Self {
        debug_assert_eq!(inputs * outputs, data.len());
        Self { inputs, outputs, data }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &'a [f64] {
        &self.data[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn data(&self) -> &'a [f64] {
        self.data
    }

    /// Output distribution `r(y) = Σ_x p(x) p(y|x)`.
    pub fn output_distribution(&self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs];
        for (x, px) in input.iter().enumerate() {
            if *px == 0.0 {
                continue;
            }
            out.iter_mut().zip(self.row(x)).for_each(|(o, w)| *o += px * w);
        }
        out
    }

    /// True when some pair of rows inside `support` differs by more than `tol`.
    pub fn rows_distinct_on(&self, support: impl IntoIterator<Item = usize>, tol: f64) -> bool {
        let mut rows = support.into_iter();
        let Some(first) = rows.next() else { return false };
        let reference = self.row(first);
        rows.any(|x| self.row(x).iter().zip(reference).any(|(a, b)| (a - b).abs() > tol))
    }

    pub fn rows_distinct(&self, tol: f64) -> bool {
        self.rows_distinct_on(0..self.inputs, tol)
    }
}

/// `−Σ p log2 p` over a raw slice, skipping zero entries.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs.iter().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Binary entropy function `H2(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

pub fn entropy(d: &Distribution) -> f64 {
    entropy_bits(d.probs()).max(0.0)
}

/// Relative entropy `D(p‖q)` in bits; `f64::INFINITY` when `supp(p) ⊄ supp(q)`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_len(p.len(), q.len())?;
    Ok(kl_bits(p.probs(), q.probs()))
}

pub(crate) fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (a, b) in p.iter().zip(q) {
        if *a > 0.0 {
            if *b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).log2();
        }
    }
    total.max(0.0)
}

/// `I(X;Y)` for input distribution `input` through `channel`.
pub fn mutual_information(input: &Distribution, channel: &ChannelMatrix<'_>) -> Result<f64> {
    check_len(channel.inputs(), input.len())?;
    Ok(mutual_information_raw(input.probs(), channel))
}

/// Mutual information without validating the input vector.
pub(crate) fn mutual_information_raw(input: &[f64], channel: &ChannelMatrix<'_>) -> f64 {
    let r = channel.output_distribution(input);
    let mut total = 0.0;
    for (x, px) in input.iter().enumerate() {
        if *px > 0.0 {
            total += px * kl_bits(channel.row(x), &r);
        }
    }
    total.max(0.0)
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::AlphabetMismatch { expected, actual });
    }
    Ok(())
}
