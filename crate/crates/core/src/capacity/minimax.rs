//! Cutting-plane saddle solver over the state simplex.
//!
//! Both `max_p min_s I_s(p)` and `max_p min_q I(p, W_q)` have the shape
//! `min_λ φ(λ)` with `φ(λ) = max_p f(λ, p)`, `f` convex in `λ` and concave
//! in `p`. Each query point gets a Blahut–Arimoto solve, which yields an
//! upper bound on `φ(λ)` and an input `p_k`. An affine minorant of
//! `λ ↦ f(λ, p_k)` becomes a cut. The dual of the cut model picks weights
//! `μ` whose mixture `Σ μ_k p_k` is certified to reach the model value, and
//! the model's minimizer is the next query point.

use super::blahut::{blahut_arimoto, BaOutcome};
use super::SolverConfig;
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::probcore::ChannelMatrix;

pub(crate) trait SaddleOracle {
    fn states(&self) -> usize;
    fn inputs(&self) -> usize;
    /// Blahut–Arimoto on the channel `max_p f(λ, ·)` refers to.
    fn solve(&self, lambda: &[f64], warm: Option<&[f64]>, cfg: &SolverConfig) -> BaOutcome;
    /// Coefficients `a` with `a·λ' ≤ f(λ', p)` on the simplex, tight near `λ`.
    fn cut(&self, lambda: &[f64], p: &[f64]) -> Vec<f64>;
    /// `min_λ f(λ, p)` when it is cheap to evaluate exactly.
    fn exact_lower(&self, _p: &[f64]) -> Option<f64> {
        None
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SaddleOutcome {
    pub lower: f64,
    pub upper: f64,
    pub input: Vec<f64>,
    /// Query point with the smallest upper bound.
    pub state: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn solve_saddle(oracle: &dyn SaddleOracle, cfg: &SolverConfig) -> SaddleOutcome {
    let ns = oracle.states();
    let mut lambda = vec![1.0 / ns as f64; ns];
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut upper = f64::INFINITY;
    let mut best_state = lambda.clone();
    let mut lower = f64::NEG_INFINITY;
    let mut input = vec![1.0 / oracle.inputs() as f64; oracle.inputs()];
    let mut warm: Option<Vec<f64>> = None;
    let mut inner_ok = true;

    for k in 1..=cfg.max_cuts {
        let out = oracle.solve(&lambda, warm.as_deref(), cfg);
        inner_ok &= out.converged;
        if out.upper < upper {
            upper = out.upper;
            best_state = lambda.clone();
        }
        cuts.push(oracle.cut(&lambda, &out.input));
        points.push(out.input.clone());
        warm = Some(out.input);

        let Some((mu, next)) = cut_model(&cuts, ns) else {
            break;
        };
        let mixed = mix_inputs(&points, &mu);
        let certified = certified_value(&cuts, &mu);
        let exact = oracle.exact_lower(&mixed).unwrap_or(f64::NEG_INFINITY);
        let candidate = certified.max(exact);
        if candidate > lower {
            lower = candidate;
            input = mixed;
        }
        if upper - lower <= cfg.tolerance {
            return SaddleOutcome { lower, upper, input, state: best_state, iterations: k, converged: inner_ok };
        }
        let moved = next.iter().zip(&lambda).any(|(a, b)| (a - b).abs() > 1e-12);
        if !moved {
            return SaddleOutcome { lower, upper, input, state: best_state, iterations: k, converged: false };
        }
        lambda = next;
    }
    let lower = lower.max(0.0);
    SaddleOutcome { lower, upper, input, iterations: cfg.max_cuts, state: best_state, converged: false }
}

/// Solves `max_{μ∈Δ} min_s Σ_k μ_k a_ks`; returns `μ` and the model minimizer `q`.
fn cut_model(cuts: &[Vec<f64>], ns: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let k = cuts.len();
    // Variables: μ_1..μ_K, w⁺, w⁻.
    let mut lp = LinearProgram::<f64>::new(k + 2);
    let mut obj = vec![0.0; k + 2];
    obj[k] = -1.0;
    obj[k + 1] = 1.0;
    lp.set_objective(obj);
    let mut simplex = vec![1.0; k + 2];
    simplex[k] = 0.0;
    simplex[k + 1] = 0.0;
    lp.add_constraint(simplex, Relation::Eq, 1.0);
    for s in 0..ns {
        let mut row: Vec<f64> = cuts.iter().map(|a| -a[s]).collect();
        row.push(1.0);
        row.push(-1.0);
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    let sol = lp.minimize(1e-9);
    if sol.status != LpStatus::Optimal {
        return None;
    }
    let mu = clip_normalize(sol.x[..k].to_vec())?;
    let q = clip_normalize(sol.duals[1..].iter().map(|y| -y).collect())?;
    Some((mu, q))
}

fn clip_normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    let total: f64 = v.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= total);
    Some(v)
}

fn certified_value(cuts: &[Vec<f64>], mu: &[f64]) -> f64 {
    let ns = cuts[0].len();
    (0..ns)
        .map(|s| cuts.iter().zip(mu).map(|(a, m)| m * a[s]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

fn mix_inputs(points: &[Vec<f64>], mu: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; points[0].len()];
    for (p, m) in points.iter().zip(mu) {
        out.iter_mut().zip(p).for_each(|(o, v)| *o += m * v);
    }
    out
}

/// `max_p min_s I_s(p)` through the channel `x → (s, y)` with weights `λ_s`.
pub(crate) struct CompoundOracle<'a> {
    pub slices: Vec<ChannelMatrix<'a>>,
}

impl SaddleOracle for CompoundOracle<'_> {
    fn states(&self) -> usize {
        self.slices.len()
    }

    fn inputs(&self) -> usize {
        self.slices[0].inputs()
    }

    fn solve(&self, lambda: &[f64], warm: Option<&[f64]>, cfg: &SolverConfig) -> BaOutcome {
        let (nx, ny) = (self.slices[0].inputs(), self.slices[0].outputs());
        let ns = self.slices.len();
        let mut data = vec![0.0; nx * ns * ny];
        for x in 0..nx {
            for (s, m) in self.slices.iter().enumerate() {
                let base = x * ns * ny + s * ny;
                data[base..base + ny].iter_mut().zip(m.row(x)).for_each(|(d, w)| *d = lambda[s] * w);
            }
        }
        let revealed = ChannelMatrix::from_parts_unchecked(nx, ns * ny, &data);
        blahut_arimoto(&revealed, cfg.inner_tolerance, cfg.max_iterations, warm)
    }

    fn cut(&self, _lambda: &[f64], p: &[f64]) -> Vec<f64> {
        self.slices.iter().map(|m| crate::probcore::mutual_information_raw(p, m)).collect()
    }

    fn exact_lower(&self, p: &[f64]) -> Option<f64> {
        Some(self.cut(&[], p).into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// `max_p min_q I(p, Σ_s q_s W_s)`.
pub(crate) struct MixtureOracle<'a> {
    pub channel: &'a crate::channels::StateChannel,
}

const TANGENT_MIX: f64 = 1e-8;

impl SaddleOracle for MixtureOracle<'_> {
    fn states(&self) -> usize {
        self.channel.states()
    }

    fn inputs(&self) -> usize {
        self.channel.inputs()
    }

    fn solve(&self, lambda: &[f64], warm: Option<&[f64]>, cfg: &SolverConfig) -> BaOutcome {
        let rows = self.channel.mixture_rows(lambda);
        let m = ChannelMatrix::from_parts_unchecked(self.channel.inputs(), self.channel.outputs(), &rows);
        blahut_arimoto(&m, cfg.inner_tolerance, cfg.max_iterations, warm)
    }

    fn cut(&self, lambda: &[f64], p: &[f64]) -> Vec<f64> {
        let ch = self.channel;
        let ns = ch.states();
        let q: Vec<f64> = lambda.iter().map(|v| (1.0 - TANGENT_MIX) * v + TANGENT_MIX / ns as f64).collect();
        let rows = ch.mixture_rows(&q);
        let (nx, ny) = (ch.inputs(), ch.outputs());
        let m = ChannelMatrix::from_parts_unchecked(nx, ny, &rows);
        let r = m.output_distribution(p);
        let value = crate::probcore::mutual_information_raw(p, &m);
        let mut grad = vec![0.0; ns];
        for (s, g) in grad.iter_mut().enumerate() {
            for x in 0..nx {
                if p[x] <= 0.0 {
                    continue;
                }
                let mixed = m.row(x);
                for (y, w) in ch.row(s, x).iter().enumerate() {
                    if *w > 0.0 {
                        *g += p[x] * w * (mixed[y] / r[y]).log2();
                    }
                }
            }
        }
        let offset = value - grad.iter().zip(&q).map(|(g, v)| g * v).sum::<f64>();
        grad.iter().map(|g| g + offset).collect()
    }
}
