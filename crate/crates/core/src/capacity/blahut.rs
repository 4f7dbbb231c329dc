//! Blahut–Arimoto iteration on a raw `[x][y]` matrix.

use crate::probcore::{kl_bits, ChannelMatrix};

#[derive(Clone, Debug)]
pub(crate) struct BaOutcome {
    /// `I(p; W)` at the returned input.
    pub lower: f64,
    /// `max_x D(W_x ‖ r)`, an upper bound on capacity.
    pub upper: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const WARM_MIX: f64 = 1e-6;

pub(crate) fn blahut_arimoto(m: &ChannelMatrix<'_>, tol: f64, max_iter: usize, warm: Option<&[f64]>) -> BaOutcome {
    let n = m.inputs();
    let uniform = 1.0 / n as f64;
    if !m.rows_distinct(1e-9) {
        return BaOutcome { lower: 0.0, upper: 0.0, input: vec![uniform; n], iterations: 0, converged: true };
    }
    let mut p: Vec<f64> = match warm {
        Some(w) if w.len() == n => w.iter().map(|v| (1.0 - WARM_MIX) * v.max(0.0) + WARM_MIX * uniform).collect(),
        _ => vec![uniform; n],
    };
    normalize(&mut p);
    let mut d = vec![0.0; n];
    let mut best_upper = f64::INFINITY;
    let mut best = (0.0, p.clone());
    for it in 1..=max_iter {
        let r = m.output_distribution(&p);
        for (x, dx) in d.iter_mut().enumerate() {
            *dx = kl_bits(m.row(x), &r);
        }
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>().max(0.0);
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        best_upper = best_upper.min(upper);
        if lower >= best.0 {
            best = (lower, p.clone());
        }
        if best_upper - best.0 <= tol {
            return BaOutcome { lower: best.0, upper: best_upper, input: best.1, iterations: it, converged: true };
        }
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - upper).exp2();
        }
        normalize(&mut p);
    }
    BaOutcome { lower: best.0, upper: best_upper, input: best.1, iterations: max_iter, converged: false }
}

fn normalize(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::binary_entropy;

    #[test]
    fn bsc_and_identity() {
        let bsc = [0.9, 0.1, 0.1, 0.9];
        let m = ChannelMatrix::new(2, 2, &bsc).unwrap();
        let out = blahut_arimoto(&m, 1e-9, 10_000, None);
        assert!(out.converged);
        assert!((out.lower - (1.0 - binary_entropy(0.1))).abs() < 1e-9);

        let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let m = ChannelMatrix::new(3, 3, &id).unwrap();
        let out = blahut_arimoto(&m, 1e-9, 10_000, None);
        assert!((out.lower - 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn z_channel_closed_form() {
        // C = log2(1 + (1−f)·f^{f/(1−f)}) for the Z-channel with fall probability f.
        let f: f64 = 0.5;
        let z = [1.0, 0.0, f, 1.0 - f];
        let m = ChannelMatrix::new(2, 2, &z).unwrap();
        let out = blahut_arimoto(&m, 1e-10, 100_000, None);
        let closed = (1.0 + (1.0 - f) * f.powf(f / (1.0 - f))).log2();
        assert!((out.lower - closed).abs() < 1e-9, "{} vs {closed}", out.lower);
        assert!(out.upper >= closed - 1e-12);
    }
}
