//! Hash disambiguation of a decoded list over `GF(2^q)`.
//!
//! The sender draws `W_1,…,W_{K1+K2}` and sends `h = Σ_j W_1^{j−1} W_{K1+j}`.
//! The receiver holds `W_1` and `h`, obtains a list of `M + 1` candidate
//! vectors for `W^{K2} = (W_{K1+1},…,W_{K1+K2})`, and accepts the first
//! candidate whose hash matches.

use rand::Rng;
use serde::Serialize;

use super::gf2q::Gf2q;
use super::{count_failures, trial_rng, Purpose, TrialReport};
use crate::error::{Error, Result};

/// How the list's false entries are chosen. Oracles see `W^{K2}` but never `W_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ListOracle {
    /// Each false entry differs from the truth by `Π_{r∈R_i}(z − r)` with
    /// disjoint root sets `|R_i| = K2 − 1`; false entries precede the truth.
    Adversarial,
    /// False entries differ in the last coordinate only, ahead of the truth.
    SingleCoordinate,
    /// Uniform random false entries at random list positions.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HashExperiment {
    pub q: u32,
    pub k1: usize,
    pub k2: usize,
    pub m: usize,
    pub oracle: ListOracle,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HashReport {
    pub report: TrialReport,
    /// `(K2 − 1)·M / 2^q`.
    pub bound: f64,
}

/// Coefficients (lowest degree first) of `Π_{r∈roots} (z − r)`.
pub(crate) fn poly_from_roots(field: &Gf2q, roots: &[u32]) -> Vec<u32> {
    let mut coeffs = vec![1u32];
    for &r in roots {
        let mut next = vec![0u32; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= field.mul(*c, r);
        }
        coeffs = next;
    }
    coeffs
}

fn hash(field: &Gf2q, key: u32, block: &[u32]) -> u32 {
    field.eval_poly(block, key)
}

pub fn run_hash_protocol(exp: &HashExperiment) -> Result<HashReport> {
    let field = Gf2q::new(exp.q)?;
    if exp.k1 == 0 || exp.k2 == 0 {
        return Err(Error::InvalidParameter("K1 and K2 must be at least 1".into()));
    }
    let order = field.order() as usize;
    let offsets: Vec<Vec<u32>> = match exp.oracle {
        ListOracle::Adversarial => {
            let per = exp.k2 - 1;
            if exp.m * per >= order {
                return Err(Error::InvalidParameter(format!(
                    "{} false entries with {per} roots each exceed the field size {order}",
                    exp.m
                )));
            }
            (0..exp.m)
                .map(|i| {
                    let roots: Vec<u32> = (0..per).map(|r| (i * per + r) as u32).collect();
                    let mut d = poly_from_roots(&field, &roots);
                    d.resize(exp.k2, 0);
                    d
                })
                .collect()
        }
        ListOracle::SingleCoordinate => (0..exp.m)
            .map(|i| {
                let mut d = vec![0u32; exp.k2];
                d[exp.k2 - 1] = 1 + (i as u32 % (field.order() - 1));
                d
            })
            .collect(),
        ListOracle::Random => Vec::new(),
    };

    let failures = count_failures(exp.trials, |t| {
        let mut rng = trial_rng(exp.seed, t, Purpose::Main);
        let words: Vec<u32> = (0..exp.k1 + exp.k2).map(|_| rng.gen_range(0..field.order())).collect();
        let key = words[0];
        let truth = &words[exp.k1..];
        let h = hash(&field, key, truth);
        let mut list: Vec<Vec<u32>> = match exp.oracle {
            ListOracle::Random => {
                let mut list: Vec<Vec<u32>> = (0..exp.m)
                    .map(|_| loop {
                        let v: Vec<u32> = (0..exp.k2).map(|_| rng.gen_range(0..field.order())).collect();
                        if v != truth {
                            break v;
                        }
                    })
                    .collect();
                let pos = rng.gen_range(0..=exp.m);
                list.insert(pos, truth.to_vec());
                list
            }
            _ => {
                let mut list: Vec<Vec<u32>> =
                    offsets.iter().map(|d| truth.iter().zip(d).map(|(a, b)| a ^ b).collect()).collect();
                list.push(truth.to_vec());
                list
            }
        };
        let accepted = list.iter_mut().find(|cand| hash(&field, key, cand) == h);
        accepted.map_or(true, |c| c.as_slice() != truth)
    });
    let bound = (exp.k2 as f64 - 1.0) * exp.m as f64 / field.order() as f64;
    Ok(HashReport { report: TrialReport::from_counts(exp.trials, failures, exp.seed), bound })
}
