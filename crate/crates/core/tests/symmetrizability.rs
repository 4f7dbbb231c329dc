mod common;

use advnet::channels::catalog::*;
use advnet::symmetrizability::*;
use common::*;
use proptest::prelude::*;
use rand::Rng;

const NET: usize = 50;

/// Symmetry residual for a binary-input, two-state channel at
/// `p(0|x'=0) = a`, `p(0|x'=1) = b`.
fn residual(t: &[Vec<Vec<f64>>], a: f64, b: f64) -> f64 {
    (0..t[0][0].len())
        .map(|y| {
            let lhs = t[0][0][y] * b + t[1][0][y] * (1.0 - b);
            let rhs = t[0][1][y] * a + t[1][1][y] * (1.0 - a);
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

fn net_minimum(t: &[Vec<Vec<f64>>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=NET {
        for j in 0..=NET {
            best = best.min(residual(t, i as f64 / NET as f64, j as f64 / NET as f64));
        }
    }
    best
}

fn lipschitz(t: &[Vec<Vec<f64>>]) -> f64 {
    (0..t[0][0].len())
        .map(|y| (t[0][0][y] - t[1][0][y]).abs() + (t[0][1][y] - t[1][1][y]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn lp_agrees_with_epsilon_net() {
    let mut r = rng(77);
    let (mut feasible, mut infeasible, mut exact_hits) = (0, 0, 0);
    for i in 0..120 {
        let outputs = r.gen_range(2..=3);
        let t: Vec<Vec<Vec<f64>>> = (0..2)
            .map(|_| (0..2).map(|_| if i % 2 == 0 { row(&mut r, outputs) } else { grid_row(&mut r, outputs, 10) }).collect())
            .collect();
        let cert = is_symmetrizable(&channel(&t)).unwrap();
        let net = net_minimum(&t);
        if cert.feasible {
            feasible += 1;
            let w = cert.witness.as_ref().unwrap();
            let (a, b) = (w.prob(&[0], 0), w.prob(&[1], 0));
            assert!(residual(&t, a, b) <= 1e-7, "witness residual for {t:?}");
            assert!(net <= lipschitz(&t) * 0.5 / NET as f64 + 1e-12, "net misses a feasible witness for {t:?}");
        } else {
            infeasible += 1;
        }
        if net <= 1e-12 {
            exact_hits += 1;
            assert!(cert.feasible, "net point is exactly symmetric but LP says infeasible: {t:?}");
        }
    }
    assert!(feasible > 10 && infeasible > 10 && exact_hits > 0, "{feasible} {infeasible} {exact_hits}");
}

#[test]
fn reference_channels() {
    let adder = symmetrizability_order(&adder_avc(), 3).unwrap();
    assert!(adder.order >= 1);
    assert!(witness_residual(&adder_avc(), adder.witness.as_ref().unwrap()) <= 1e-7);
    let t = vec![vec![vec![0.9, 0.1], vec![0.1, 0.9]], vec![vec![0.8, 0.2], vec![0.2, 0.8]]];
    let ord = symmetrizability_order(&channel(&t), 3).unwrap();
    assert_eq!(ord.order, 0);
    assert!(ord.witness.is_none());
    let xor = symmetrizability_order(&binary_additive_avc(), 2).unwrap();
    assert!(xor.cap_reached && xor.order == 2);
}

fn arb_channel() -> impl Strategy<Value = Vec<Vec<Vec<f64>>>> {
    (2..=3usize, 2..=3usize, 2..=3usize, any::<u64>()).prop_map(|(s, x, y, seed)| {
        let mut r = rng(seed);
        (0..s).map(|_| (0..x).map(|_| grid_row(&mut r, y, 4)).collect()).collect()
    })
}

proptest! {
    #![proptest_config(cases(40))]

    #[test]
    fn witnesses_satisfy_every_permutation(t in arb_channel(), m in 1..=2usize) {
        let ch = channel(&t);
        let cert = symmetrizable_of_order(&ch, m, &SymmetrizabilityConfig::default()).unwrap();
        if let Some(w) = &cert.witness {
            prop_assert!(cert.feasible);
            prop_assert!(witness_residual(&ch, w) <= 1e-7);
            for r in &w.rows {
                prop_assert!((r.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        } else {
            prop_assert!(!cert.feasible);
        }
    }

    #[test]
    fn higher_order_implies_lower_order(t in arb_channel()) {
        let ch = channel(&t);
        let cfg = SymmetrizabilityConfig::default();
        let one = symmetrizable_of_order(&ch, 1, &cfg).unwrap().feasible;
        let two = symmetrizable_of_order(&ch, 2, &cfg).unwrap().feasible;
        prop_assert!(!two || one);
    }

    #[test]
    fn symmetric_and_ordered_witnesses_agree(t in arb_channel(), m in 1..=2usize) {
        let ch = channel(&t);
        let cfg = SymmetrizabilityConfig::default();
        let sym = symmetrizable_of_order(&ch, m, &cfg).unwrap();
        let free = symmetrizable_of_order_unconstrained(&ch, m, &cfg).unwrap();
        prop_assert_eq!(sym.feasible, free.feasible);
        if let Some(w) = &free.witness {
            prop_assert!(!w.symmetric);
            prop_assert!(witness_residual(&ch, w) <= 1e-7);
        }
    }
}
