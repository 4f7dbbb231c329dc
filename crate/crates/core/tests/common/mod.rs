#![allow(dead_code)]

use advnet::channels::StateChannel;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random stochastic row of length `k`.
pub fn row(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|v| v / t).collect()
}

/// Random row with entries on a grid of `1/den`.
pub fn grid_row(rng: &mut ChaCha8Rng, k: usize, den: u32) -> Vec<f64> {
    let mut counts = vec![0u32; k];
    for _ in 0..den {
        counts[rng.gen_range(0..k)] += 1;
    }
    counts.into_iter().map(|c| c as f64 / den as f64).collect()
}

pub fn tensor(rng: &mut ChaCha8Rng, s: usize, x: usize, y: usize) -> Vec<Vec<Vec<f64>>> {
    (0..s).map(|_| (0..x).map(|_| row(rng, y)).collect()).collect()
}

pub fn channel(t: &[Vec<Vec<f64>>]) -> StateChannel {
    StateChannel::from_nested(t).unwrap()
}

/// `I(X;Y)` in bits for input `p` and rows `w[x][y]`.
pub fn mi(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let ny = w[0].len();
    let out: Vec<f64> = (0..ny).map(|y| p.iter().zip(w).map(|(px, r)| px * r[y]).sum()).collect();
    let mut total = 0.0;
    for (px, r) in p.iter().zip(w) {
        for y in 0..ny {
            let j = px * r[y];
            if j > 0.0 {
                total += j * (r[y] / out[y]).log2();
            }
        }
    }
    total.max(0.0)
}

/// `Σ_s q_s W_s`.
pub fn mix(t: &[Vec<Vec<f64>>], q: &[f64]) -> Vec<Vec<f64>> {
    let (nx, ny) = (t[0].len(), t[0][0].len());
    (0..nx).map(|x| (0..ny).map(|y| t.iter().zip(q).map(|(w, qs)| qs * w[x][y]).sum()).collect()).collect()
}

/// Golden-section minimum of a unimodal function on `[0, 1]`.
pub fn golden_min(f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    f(0.0).min(f(1.0)).min(fc).min(fd)
}

pub const GRID: usize = 10_000;

/// Exhaustive grid oracles for binary-input channels with at most two states:
/// `(C̲, C̄, C_r lower, C_r upper)`.
pub fn binary_grid_oracle(t: &[Vec<Vec<f64>>]) -> (f64, f64, f64, f64) {
    let ps: Vec<[f64; 2]> = (0..=GRID).map(|i| {
        let a = i as f64 / GRID as f64;
        [a, 1.0 - a]
    }).collect();
    let lower = ps.iter().map(|p| t.iter().map(|w| mi(p, w)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let upper = t.iter().map(|w| ps.iter().map(|p| mi(p, w)).fold(0.0, f64::max)).fold(f64::INFINITY, f64::min);
    if t.len() == 1 {
        return (lower, upper, lower, upper);
    }
    let mixed = |a: f64| mix(t, &[a, 1.0 - a]);
    let cr_lo = ps.iter().map(|p| golden_min(|a| mi(p, &mixed(a)))).fold(0.0, f64::max);
    let cr_hi = (0..=GRID)
        .map(|i| {
            let w = mixed(i as f64 / GRID as f64);
            -golden_min(|a| -mi(&[a, 1.0 - a], &w))
        })
        .fold(f64::INFINITY, f64::min);
    (lower, upper, cr_lo, cr_hi)
}

pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases: n, failure_persistence: None, ..Default::default() }
}
