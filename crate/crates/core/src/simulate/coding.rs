//! Random-codebook maximum-likelihood decoding without listing the codebook.
//!
//! Competitor codewords are i.i.d. draws from the codebook input law and
//! independent of the channel output, so given the output `y^n` a
//! competitor's score `Σ_t log2 D(y_t | x'_t)` has a law that depends only on
//! how often each output symbol occurs. Scores are quantized to integer
//! multiples of `2^-SCORE_QUANTUM_BITS`, and the law is built by sparse
//! convolution. From it come the probabilities that a competitor beats or
//! ties the sent codeword, and from those the exact probability that ML
//! decoding with uniform tie-breaking succeeds against `N` competitors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub const SCORE_QUANTUM_BITS: u32 = 30;

/// Largest support a score law may reach before giving up.
pub const DEFAULT_SUPPORT_CAP: usize = 200_000;

/// Decoding metric `log2 D(y|x)`, quantized; `None` is `−∞`.
#[derive(Clone, Debug)]
pub(crate) struct Metric {
    inputs: usize,
    outputs: usize,
    table: Vec<Option<i64>>,
}

impl Metric {
    /// `rows` is a flat `[x][y]` stochastic matrix.
    pub fn new(inputs: usize, outputs: usize, rows: &[f64]) -> Self {
        let scale = (1u64 << SCORE_QUANTUM_BITS) as f64;
        let table = rows.iter().map(|p| if *p > 0.0 { Some((p.log2() * scale).round() as i64) } else { None }).collect();
        Self { inputs, outputs, table }
    }

    pub fn symbol(&self, x: usize, y: usize) -> Option<i64> {
        self.table[x * self.outputs + y]
    }

    pub fn score(&self, x: &[usize], y: &[usize]) -> Option<i64> {
        x.iter().zip(y).try_fold(0i64, |acc, (a, b)| self.symbol(*a, *b).map(|v| acc + v))
    }
}

/// Law of a score: finite values with their probabilities; the rest of the
/// mass sits at `−∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreDistribution {
    finite: BTreeMap<i64, f64>,
}

impl ScoreDistribution {
    /// Point mass at score 0.
    pub fn unit() -> Self {
        Self { finite: BTreeMap::from([(0, 1.0)]) }
    }

    pub fn from_masses(masses: impl IntoIterator<Item = (i64, f64)>) -> Self {
        let mut finite = BTreeMap::new();
        for (v, p) in masses {
            if p > 0.0 {
                *finite.entry(v).or_insert(0.0) += p;
            }
        }
        Self { finite }
    }

    pub fn support(&self) -> usize {
        self.finite.len()
    }

    pub fn finite_mass(&self) -> f64 {
        self.finite.values().sum()
    }

    pub fn convolve(&self, other: &Self, cap: usize) -> Result<Self> {
        let mut out: BTreeMap<i64, f64> = BTreeMap::new();
        for (a, pa) in &self.finite {
            for (b, pb) in &other.finite {
                *out.entry(a + b).or_insert(0.0) += pa * pb;
            }
            if out.len() > cap {
                return Err(Error::SizeExceeded { what: "score distribution support".into(), needed: out.len(), cap });
            }
        }
        Ok(Self { finite: out })
    }

    pub fn power(&self, mut e: usize, cap: usize) -> Result<Self> {
        let mut acc = Self::unit();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.convolve(&base, cap)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.convolve(&base, cap)?;
            }
        }
        Ok(acc)
    }

    /// `(P(score > a), P(score = a))`; `a = None` is `−∞`.
    pub fn tail(&self, a: Option<i64>) -> (f64, f64) {
        match a {
            None => {
                let finite = self.finite_mass().min(1.0);
                (finite, (1.0 - finite).max(0.0))
            }
            Some(a) => {
                let gt = self.finite.range(a + 1..).map(|(_, p)| p).sum();
                let eq = self.finite.get(&a).copied().unwrap_or(0.0);
                (gt, eq)
            }
        }
    }
}

/// Law of a competitor's score given the output symbol counts.
pub(crate) fn competitor_law(metric: &Metric, input: &[f64], counts: &[usize], cap: usize) -> Result<ScoreDistribution> {
    let mut acc = ScoreDistribution::unit();
    for (y, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let symbol = ScoreDistribution::from_masses(
            (0..metric.inputs).filter_map(|x| metric.symbol(x, y).map(|v| (v, input[x]))),
        );
        acc = acc.convolve(&symbol.power(c, cap)?, cap)?;
    }
    Ok(acc)
}

/// Probability that ML decoding with uniform tie-breaking picks the sent
/// codeword, given `n` independent competitors that each beat it with
/// probability `gt` and tie with probability `eq`, plus `ties` further
/// competitors known to tie.
///
/// Equals `∫_0^1 t^ties (1 − gt − eq(1 − t))^n dt`.
pub fn success_probability(n: f64, gt: f64, eq: f64, ties: usize) -> f64 {
    let gt = gt.clamp(0.0, 1.0);
    let eq = eq.clamp(0.0, 1.0 - gt);
    let base = 1.0 / (1.0 + ties as f64);
    if n <= 0.0 {
        return base;
    }
    let log_no_gt = n * (-gt).ln_1p();
    if n * eq < 1e-8 {
        return base * log_no_gt.exp();
    }
    // Substitute u = 1 − t; the integrand is negligible beyond u ≈ 60/(n·eq).
    let upper = (60.0 / (n * eq)).min(1.0);
    let f = |u: f64| (1.0 - u).powi(ties as i32) * (n * (-(gt + eq * u)).ln_1p()).exp();
    let steps = 2000;
    let h = upper / steps as f64;
    let mut sum = f(0.0) + f(upper);
    for i in 1..steps {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (sum * h / 3.0).clamp(0.0, 1.0)
}

/// Number of random competitors in a codebook of `2^bits` words.
pub(crate) fn competitors(bits: u32) -> f64 {
    (bits as f64).exp2() - 1.0
}

/// Largest message size the engine handles.
pub(crate) const MAX_MESSAGE_BITS: u32 = 900;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn success_closed_forms() {
        assert_eq!(success_probability(0.0, 0.3, 0.3, 0), 1.0);
        assert!((success_probability(0.0, 0.0, 0.0, 1) - 0.5).abs() < 1e-15);
        // Everyone ties: 1/(n+1).
        assert!((success_probability(9.0, 0.0, 1.0, 0) - 0.1).abs() < 1e-6);
        assert!((success_probability(8.0, 0.0, 1.0, 1) - 0.1).abs() < 1e-6);
        // No ties: (1 − gt)^n.
        assert!((success_probability(10.0, 0.1, 0.0, 0) - 0.9f64.powi(10)).abs() < 1e-12);
        // e = 0 closed form.
        let (n, gt, eq) = (20.0f64, 0.05f64, 0.1f64);
        let closed = (1.0f64 - gt).powf(n + 1.0) - (1.0f64 - gt - eq).powf(n + 1.0);
        let closed = closed / ((n + 1.0) * eq);
        assert!((success_probability(n, gt, eq, 0) - closed).abs() < 1e-9);
    }

    #[test]
    fn success_matches_binomial_sum() {
        // Σ_K C(n,K) eq^K (1−gt−eq)^{n−K} / (1 + e + K)
        let (n, gt, eq, e) = (12usize, 0.07f64, 0.2f64, 2usize);
        let mut direct = 0.0;
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            direct += binom * eq.powi(k as i32) * (1.0 - gt - eq).powi((n - k) as i32) / (1 + e + k) as f64;
        }
        assert!((success_probability(n as f64, gt, eq, e) - direct).abs() < 1e-9);
    }

    #[test]
    fn laws_and_tails() {
        let metric = Metric::new(2, 2, &[0.5, 0.5, 0.0, 1.0]);
        // Output symbol 1 twice; x'=0 scores −1, x'=1 scores 0.
        let law = competitor_law(&metric, &[0.5, 0.5], &[0, 2], 100).unwrap();
        let q = 1i64 << SCORE_QUANTUM_BITS;
        let (gt, eq) = law.tail(Some(-q));
        assert!((gt - 0.25).abs() < 1e-15 && (eq - 0.5).abs() < 1e-15);
        // Output symbol 0 forces x' = 0.
        let law = competitor_law(&metric, &[0.5, 0.5], &[1, 0], 100).unwrap();
        assert!((law.finite_mass() - 0.5).abs() < 1e-15);
        assert_eq!(law.tail(None), (0.5, 0.5));
        assert!(ScoreDistribution::from_masses((0..10).map(|v| (v, 0.1))).power(50, 100).is_err());
    }
}
