mod common;

use advnet::capacity::{ba_capacity, SolverConfig};
use advnet::channels::catalog::*;
use advnet::channels::StateChannel;
use advnet::simulate::*;
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn draw(r: &mut rand_chacha::ChaCha8Rng, p: &[f64]) -> usize {
    let u: f64 = r.gen();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Random-codebook ML decoding with every codeword listed. Scores are summed
/// from joint type counts so equal types tie exactly.
fn explicit_error_rate(ch: &StateChannel, n: usize, bits: u32, trials: usize, seed: u64) -> f64 {
    let input = ba_capacity(ch, &SolverConfig::default()).unwrap().optimizer_input.probs().to_vec();
    let (nx, ny) = (ch.inputs(), ch.outputs());
    let mut r = rng(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let words: Vec<Vec<usize>> = (0..1usize << bits).map(|_| (0..n).map(|_| draw(&mut r, &input)).collect()).collect();
        let y: Vec<usize> = words[0].iter().map(|&x| draw(&mut r, ch.row(0, x))).collect();
        let score = |w: &[usize]| -> f64 {
            let mut counts = vec![0usize; nx * ny];
            w.iter().zip(&y).for_each(|(&x, &v)| counts[x * ny + v] += 1);
            let mut s = 0.0;
            for x in 0..nx {
                for v in 0..ny {
                    let c = counts[x * ny + v];
                    if c > 0 {
                        let p = ch.prob(0, x, v);
                        if p == 0.0 {
                            return f64::NEG_INFINITY;
                        }
                        s += c as f64 * p.log2();
                    }
                }
            }
            s
        };
        let scores: Vec<f64> = words.iter().map(|w| score(w)).collect();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
        if winners[r.gen_range(0..winners.len())] != 0 {
            failures += 1;
        }
    }
    failures as f64 / trials as f64
}

fn engine_error_rate(ch: &StateChannel, n: usize, bits: u32, trials: u64, seed: u64) -> f64 {
    let exp = FeedbackExperiment {
        rate: bits as f64 / n as f64,
        n1: 0,
        n2: 0,
        n3: n,
        true_state: 0,
        feedback: false,
        trials,
        seed,
    };
    let r = run_cc_feedback_protocol(ch, &exp).unwrap();
    assert_eq!(r.message_bits, bits);
    r.report.error_rate
}

#[test]
fn coding_engine_matches_explicit_codebooks() {
    for (ch, n, bits) in [(bsc(0.11).unwrap(), 16, 8), (z_channel(0.3).unwrap(), 14, 6), (identity(3), 4, 5)] {
        let trials = 3000;
        let a = explicit_error_rate(&ch, n, bits, trials, 5);
        let b = engine_error_rate(&ch, n, bits, trials as u64, 6);
        assert!(a > 0.02 && a < 0.98, "uninformative setting: {a}");
        let p = (a + b) / 2.0;
        let sigma = (p * (1.0 - p) * 2.0 / trials as f64).sqrt();
        assert!((a - b).abs() <= 4.0 * sigma + 0.005, "explicit {a} vs engine {b} (n={n}, bits={bits})");
    }
}

#[test]
fn training_respects_the_bhattacharyya_union_bound() {
    let t = vec![
        vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        vec![vec![0.6, 0.4], vec![0.4, 0.6]],
        vec![vec![0.75, 0.25], vec![0.3, 0.7]],
    ];
    let ch = channel(&t);
    for true_state in 0..3 {
        for n in [5, 20, 60] {
            let bound: f64 = (0..3)
                .filter(|&s| s != true_state)
                .map(|s| {
                    let per_symbol: f64 = (0..2)
                        .map(|x| 0.5 * (0..2).map(|y| (t[true_state][x][y] * t[s][x][y]).sqrt()).sum::<f64>())
                        .sum();
                    per_symbol.powi(n as i32)
                })
                .sum::<f64>()
                .min(1.0);
            let trials = 2000u64;
            let r = run_training_estimator(&ch, true_state, n, trials, 17).unwrap();
            let slack = 4.0 * (bound * (1.0 - bound) / trials as f64).sqrt() + 2.0 / trials as f64;
            assert!(r.error_rate <= bound + slack, "state {true_state}, n {n}: {} vs bound {bound}", r.error_rate);
        }
    }
}

#[test]
fn training_error_shrinks_with_blocklength() {
    let ch = compound_bsc(&[0.1, 0.4]).unwrap();
    let uppers: Vec<f64> =
        [10, 50, 200, 800].iter().map(|&n| run_training_estimator(&ch, 0, n, 2000, 3).unwrap().wilson_upper_95).collect();
    assert!(uppers.windows(2).all(|w| w[1] <= w[0]), "{uppers:?}");
    assert!(uppers[3] <= 0.05);
}

fn roots(f: &Gf2q, coeffs: &[u32]) -> usize {
    (0..f.order()).filter(|&z| f.eval_poly(coeffs, z) == 0).count()
}

#[test]
fn hash_collisions_match_root_counts() {
    let f = Gf2q::new(8).unwrap();
    let order = f.order() as f64;
    // Nonzero polynomials of degree < K2 have at most K2 − 1 roots.
    let mut r = rng(9);
    for _ in 0..500 {
        let k2 = r.gen_range(2..=6);
        let mut c: Vec<u32> = (0..k2).map(|_| r.gen_range(0..256)).collect();
        c[k2 - 1] |= 1;
        assert!(roots(&f, &c) < k2);
    }
    for (oracle, k2, m) in [(ListOracle::SingleCoordinate, 5, 3), (ListOracle::Adversarial, 5, 1), (ListOracle::Adversarial, 4, 6)] {
        // Root counts of the hash differences give the exact failure rate.
        let exact = match oracle {
            ListOracle::SingleCoordinate => {
                let mut mono = vec![0u32; k2];
                mono[k2 - 1] = 1;
                roots(&f, &mono) as f64 / order
            }
            _ => m as f64 * (k2 - 1) as f64 / order,
        };
        let trials = 40_000u64;
        let rep = run_hash_protocol(&HashExperiment { q: 8, k1: 1, k2, m, oracle, trials, seed: 21 }).unwrap();
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((rep.report.error_rate - exact).abs() <= 4.0 * sigma, "{oracle:?}: {} vs {exact}", rep.report.error_rate);
        assert!(exact <= rep.bound + 1e-12);
    }
    let none = run_hash_protocol(&HashExperiment { q: 16, k1: 2, k2: 5, m: 0, oracle: ListOracle::Random, trials: 500, seed: 1 }).unwrap();
    assert_eq!(none.report.failures, 0);
}

#[test]
fn inverses_exist_for_every_nonzero_byte() {
    let f = Gf2q::new(8).unwrap();
    for a in 1..256 {
        let inv = f.inv(a).unwrap();
        assert_eq!(f.mul(a, inv), 1);
    }
    assert_eq!(f.inv(0), None);
    assert_eq!(f.pow(0, 0), 1);
}

proptest! {
    #![proptest_config(cases(200))]

    #[test]
    fn field_axioms(q in prop::sample::select(vec![8u32, 16]), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = Gf2q::new(q).unwrap();
        let mask = f.order() - 1;
        let (a, b, c) = (a & mask, b & mask, c & mask);
        prop_assert_eq!(f.mul(f.add(a, b), c), f.add(f.mul(a, c), f.mul(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, 1), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, (f.order() - 1) as u64), 1);
        }
    }

    #[test]
    fn reports_depend_only_on_the_seed(seed in any::<u64>()) {
        let ch = compound_bsc(&[0.2, 0.3]).unwrap();
        prop_assert_eq!(run_training_estimator(&ch, 1, 12, 64, seed).unwrap(), run_training_estimator(&ch, 1, 12, 64, seed).unwrap());
        let exp = HashExperiment { q: 8, k1: 1, k2: 3, m: 2, oracle: ListOracle::Random, trials: 64, seed };
        prop_assert_eq!(run_hash_protocol(&exp).unwrap(), run_hash_protocol(&exp).unwrap());
        let avc = AvcExperiment {
            rate: 0.2,
            n: 20,
            num_seeds: 3,
            epsilon: 0.1,
            adversary: AdversaryStrategy::Spoofing { target_codebook: 0 },
            trials: 32,
            seed,
        };
        let a = run_avc_common_randomness_experiment(&adder_avc(), &avc).unwrap();
        prop_assert_eq!(&a, &run_avc_common_randomness_experiment(&adder_avc(), &avc).unwrap());
        prop_assert!(a.deterministic.wilson_upper_95 >= a.deterministic.error_rate);
        prop_assert!(a.shared.failures <= a.shared.trials);
    }
}
