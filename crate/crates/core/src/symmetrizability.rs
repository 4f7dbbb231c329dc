//! Symmetrizability of a state channel and its order.
//!
//! A channel is symmetrizable of order `M` when some stochastic map
//! `p(s | x_1,…,x_M)` makes `Σ_s p(y|x,s) p(s|x_1,…,x_M)` symmetric in
//! `(x, x_1,…,x_M)`. Order 1 is plain symmetrizability. Feasibility is a
//! linear program; the phase-one residual decides it, with an exact rational
//! re-solve for residuals in the ambiguous band.

use num_rational::BigRational;
use serde::Serialize;

use crate::channels::StateChannel;
use crate::error::{Error, Result};
use crate::lp::{is_exact_zero, to_rational, LinearProgram, LpScalar, Relation};
use crate::probcore::Distribution;

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizabilityConfig {
    /// Residual at or below this is feasible.
    pub feasible_tol: f64,
    /// Residual at or above this is infeasible; anything between is re-solved exactly.
    pub infeasible_tol: f64,
    /// Witness residual accepted without an exact re-solve.
    pub witness_tol: f64,
    /// Cap on dense tableau cells.
    pub max_lp_cells: usize,
}

impl Default for SymmetrizabilityConfig {
    fn default() -> Self {
        Self { feasible_tol: 1e-9, infeasible_tol: 1e-6, witness_tol: 1e-7, max_lp_cells: 4_000_000 }
    }
}

/// `p(s | x_1,…,x_M)`, one row per sorted argument tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub order: usize,
    pub inputs: usize,
    pub states: usize,
    /// Sorted when the witness is symmetric, every ordered tuple otherwise.
    pub args: Vec<Vec<usize>>,
    pub rows: Vec<Distribution>,
    pub symmetric: bool,
}

impl Witness {
    /// `p(s | args)`; argument order is ignored for symmetric witnesses.
    pub fn prob(&self, args: &[usize], s: usize) -> f64 {
        self.row(args).probs()[s]
    }

    pub fn row(&self, args: &[usize]) -> &Distribution {
        let mut key = args.to_vec();
        if self.symmetric {
            key.sort_unstable();
        }
        let idx = self.args.iter().position(|a| *a == key).expect("argument tuple in range");
        &self.rows[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetrizabilityCertificate {
    pub order_tested: usize,
    pub feasible: bool,
    pub witness: Option<Witness>,
    /// Largest symmetry-equation residual at the witness (0 when infeasible).
    pub max_violation: f64,
    /// Minimal total violation found by phase one.
    pub lp_residual: f64,
    /// Whether an exact rational solve settled the verdict.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetrizabilityOrder {
    /// Largest feasible order up to the cap; 0 means non-symmetrizable.
    pub order: usize,
    pub cap_reached: bool,
    /// Certificate at the largest feasible order, if any.
    pub witness: Option<Witness>,
    pub max_violation: f64,
}

/// Order-1 test.
pub fn is_symmetrizable(ch: &StateChannel) -> Result<SymmetrizabilityCertificate> {
    symmetrizable_of_order(ch, 1, &SymmetrizabilityConfig::default())
}

/// Order-`m` test with a witness symmetric in its arguments.
pub fn symmetrizable_of_order(
    ch: &StateChannel,
    m: usize,
    cfg: &SymmetrizabilityConfig,
) -> Result<SymmetrizabilityCertificate> {
    solve(ch, m, true, cfg)
}

/// Order-`m` test with an unconstrained witness over ordered tuples.
pub fn symmetrizable_of_order_unconstrained(
    ch: &StateChannel,
    m: usize,
    cfg: &SymmetrizabilityConfig,
) -> Result<SymmetrizabilityCertificate> {
    solve(ch, m, false, cfg)
}

/// Largest `M ≤ cap` admitting an order-`M` symmetrization.
pub fn symmetrizability_order(ch: &StateChannel, cap: usize) -> Result<SymmetrizabilityOrder> {
    symmetrizability_order_with(ch, cap, &SymmetrizabilityConfig::default())
}

pub fn symmetrizability_order_with(
    ch: &StateChannel,
    cap: usize,
    cfg: &SymmetrizabilityConfig,
) -> Result<SymmetrizabilityOrder> {
    if cap == 0 {
        return Err(Error::InvalidParameter("order cap must be at least 1".into()));
    }
    let mut best = SymmetrizabilityOrder { order: 0, cap_reached: false, witness: None, max_violation: 0.0 };
    for m in 1..=cap {
        let cert = symmetrizable_of_order(ch, m, cfg)?;
        if !cert.feasible {
            return Ok(best);
        }
        best = SymmetrizabilityOrder {
            order: m,
            cap_reached: m == cap,
            witness: cert.witness,
            max_violation: cert.max_violation,
        };
    }
    Ok(best)
}

/// Sorted `k`-multisets over `0..n`, in lexicographic order.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, k, v, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Every ordered `k`-tuple over `0..n`.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = n.pow(k as u32);
    (0..total)
        .map(|mut i| {
            let mut t = vec![0; k];
            for pos in (0..k).rev() {
                t[pos] = i % n;
                i /= n;
            }
            t
        })
        .collect()
}

/// One symmetry equation: `Σ_s W(y|a,s) p(s|ctx_a) − Σ_s W(y|b,s) p(s|ctx_b) = 0`.
struct Equation {
    a: usize,
    ctx_a: usize,
    b: usize,
    ctx_b: usize,
}

struct Model {
    args: Vec<Vec<usize>>,
    equations: Vec<Equation>,
}

fn build_model(nx: usize, m: usize, symmetric: bool) -> Model {
    if symmetric {
        let args = multisets(nx, m);
        let index = |key: &[usize]| args.iter().position(|a| a == key).expect("multiset present");
        let mut equations = Vec::new();
        for t in multisets(nx, m + 1) {
            let mut distinct = t.clone();
            distinct.dedup();
            let rest = |x: usize| {
                let mut r = t.clone();
                let pos = r.iter().position(|v| *v == x).expect("member");
                r.remove(pos);
                r
            };
            let first = distinct[0];
            let ctx_first = index(&rest(first));
            for &x in &distinct[1..] {
                equations.push(Equation { a: first, ctx_a: ctx_first, b: x, ctx_b: index(&rest(x)) });
            }
        }
        Model { args, equations }
    } else {
        let args = tuples(nx, m);
        let index = |key: &[usize]| key.iter().fold(0, |acc, v| acc * nx + v);
        let mut equations = Vec::new();
        for t in tuples(nx, m + 1) {
            for i in 0..m {
                let mut u = t.clone();
                u.swap(i, i + 1);
                if u <= t {
                    continue;
                }
                equations.push(Equation { a: t[0], ctx_a: index(&t[1..]), b: u[0], ctx_b: index(&u[1..]) });
            }
        }
        Model { args, equations }
    }
}

fn solve(ch: &StateChannel, m: usize, symmetric: bool, cfg: &SymmetrizabilityConfig) -> Result<SymmetrizabilityCertificate> {
    if m == 0 {
        return Err(Error::InvalidParameter("symmetrizability order must be at least 1".into()));
    }
    let (nx, ny, ns) = (ch.inputs(), ch.outputs(), ch.states());
    let ctx_count = if symmetric { binomial(nx + m - 1, m) } else { nx.checked_pow(m as u32).unwrap_or(usize::MAX) };
    let vars = ctx_count.saturating_mul(ns);
    let eq_estimate = if symmetric { binomial(nx + m, m + 1) * nx } else { nx.saturating_pow(m as u32 + 1) * m };
    let rows = ctx_count + eq_estimate.saturating_mul(ny);
    let cells = (rows + 1).saturating_mul(vars.saturating_add(2 * rows + 1));
    if cells > cfg.max_lp_cells {
        return Err(Error::SizeExceeded { what: format!("order-{m} symmetrizability LP"), needed: cells, cap: cfg.max_lp_cells });
    }

    let model = build_model(nx, m, symmetric);
    let lp = build_lp(ch, &model);
    let (residual, x) = lp.min_violation();
    let witness_from = |x: &[f64]| make_witness(ch, m, &model, x, symmetric);

    if residual <= cfg.feasible_tol {
        let w = witness_from(&x);
        let v = max_violation(ch, &model, &w);
        if v <= cfg.witness_tol {
            return Ok(feasible(m, w, v, residual, false));
        }
    } else if residual >= cfg.infeasible_tol {
        return Ok(infeasible(m, residual, false));
    }

    let exact = to_rational(&lp);
    let (exact_residual, exact_x) = exact.min_violation();
    if is_exact_zero(&exact_residual) {
        let xf: Vec<f64> = exact_x.iter().map(LpScalar::to_f64).collect();
        let w = witness_from(&xf);
        let v = max_violation(ch, &model, &w);
        Ok(feasible(m, w, v, 0.0, true))
    } else {
        Ok(infeasible(m, <BigRational as LpScalar>::to_f64(&exact_residual), true))
    }
}

fn feasible(m: usize, w: Witness, v: f64, residual: f64, exact: bool) -> SymmetrizabilityCertificate {
    SymmetrizabilityCertificate { order_tested: m, feasible: true, witness: Some(w), max_violation: v, lp_residual: residual, exact }
}

fn infeasible(m: usize, residual: f64, exact: bool) -> SymmetrizabilityCertificate {
    SymmetrizabilityCertificate { order_tested: m, feasible: false, witness: None, max_violation: 0.0, lp_residual: residual, exact }
}

fn build_lp(ch: &StateChannel, model: &Model) -> LinearProgram<f64> {
    let (ny, ns) = (ch.outputs(), ch.states());
    let vars = model.args.len() * ns;
    let mut lp = LinearProgram::new(vars);
    for c in 0..model.args.len() {
        let mut row = vec![0.0; vars];
        row[c * ns..(c + 1) * ns].iter_mut().for_each(|v| *v = 1.0);
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    for eq in &model.equations {
        for y in 0..ny {
            let mut row = vec![0.0; vars];
            for s in 0..ns {
                row[eq.ctx_a * ns + s] += ch.prob(s, eq.a, y);
                row[eq.ctx_b * ns + s] -= ch.prob(s, eq.b, y);
            }
            if row.iter().any(|v| *v != 0.0) {
                lp.add_constraint(row, Relation::Eq, 0.0);
            }
        }
    }
    lp
}

fn make_witness(ch: &StateChannel, m: usize, model: &Model, x: &[f64], symmetric: bool) -> Witness {
    let ns = ch.states();
    let rows = (0..model.args.len())
        .map(|c| {
            let w: Vec<f64> = x[c * ns..(c + 1) * ns].iter().map(|v| v.max(0.0)).collect();
            Distribution::from_weights(&w).unwrap_or_else(|_| Distribution::uniform(ns))
        })
        .collect();
    Witness { order: m, inputs: ch.inputs(), states: ns, args: model.args.clone(), rows, symmetric }
}

fn max_violation(ch: &StateChannel, model: &Model, w: &Witness) -> f64 {
    let mut worst: f64 = 0.0;
    for eq in &model.equations {
        let (pa, pb) = (w.rows[eq.ctx_a].probs(), w.rows[eq.ctx_b].probs());
        for y in 0..ch.outputs() {
            let lhs: f64 = (0..ch.states()).map(|s| ch.prob(s, eq.a, y) * pa[s]).sum();
            let rhs: f64 = (0..ch.states()).map(|s| ch.prob(s, eq.b, y) * pb[s]).sum();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

/// Residual of the order-`M` symmetry conditions at `w`, over every
/// permutation of every argument tuple. Independent of the LP's equation set.
pub fn witness_residual(ch: &StateChannel, w: &Witness) -> f64 {
    let m = w.order;
    let mut worst: f64 = 0.0;
    for t in tuples(ch.inputs(), m + 1) {
        let value = |u: &[usize], y: usize| -> f64 {
            (0..ch.states()).map(|s| ch.prob(s, u[0], y) * w.prob(&u[1..], s)).sum()
        };
        for i in 1..=m {
            let mut u = t.clone();
            u.swap(0, i);
            for y in 0..ch.outputs() {
                worst = worst.max((value(&t, y) - value(&u, y)).abs());
            }
        }
    }
    worst
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::catalog::*;

    #[test]
    fn adder_is_symmetrizable_with_identity_witness() {
        let cert = is_symmetrizable(&adder_avc()).unwrap();
        assert!(cert.feasible);
        let w = cert.witness.unwrap();
        assert!(cert.max_violation <= 1e-7);
        assert!(witness_residual(&adder_avc(), &w) <= 1e-7);
        // The solution is unique: p(s|x') = 1{s = x'}.
        assert!((w.prob(&[0], 0) - 1.0).abs() < 1e-9 && (w.prob(&[1], 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stateless_cases() {
        assert!(!is_symmetrizable(&bsc(0.1).unwrap()).unwrap().feasible);
        let flat = constant_rows(3, &[0.3, 0.7]).unwrap();
        assert!(is_symmetrizable(&flat).unwrap().feasible);
    }

    #[test]
    fn orders() {
        let o = symmetrizability_order(&bsc(0.1).unwrap(), 3).unwrap();
        assert_eq!((o.order, o.cap_reached), (0, false));
        let o = symmetrizability_order(&binary_additive_avc(), 2).unwrap();
        assert!(o.order >= 1);
        let flat = constant_rows(2, &[0.5, 0.5]).unwrap();
        let o = symmetrizability_order(&flat, 2).unwrap();
        assert_eq!((o.order, o.cap_reached), (2, true));
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(tuples(2, 2).len(), 4);
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn size_cap() {
        let cfg = SymmetrizabilityConfig { max_lp_cells: 10, ..Default::default() };
        assert!(matches!(symmetrizable_of_order(&adder_avc(), 1, &cfg), Err(Error::SizeExceeded { .. })));
    }
}
