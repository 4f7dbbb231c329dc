//! Dense two-phase simplex over a generic scalar.
//!
//! Problems are `minimize c·x subject to rows, x ≥ 0`. Phase one minimizes
//! the total violation `Σ artificials`, which is exposed directly through
//! [`LinearProgram::min_violation`] for feasibility questions. The same code
//! runs on `f64` and on [`BigRational`] for exact re-solves.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Magnitudes at or below this are zero for pivoting decisions.
    fn eps() -> Self;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn eps() -> Self {
        1e-11
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite coefficient")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn eps() -> Self {
        <BigRational as Zero>::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    /// Optimal phase-one value (total violation of the constraints).
    pub phase_one_residual: T,
    /// One multiplier per constraint, `c_j − Σ_i y_i a_ij ≥ 0` at an optimum.
    pub duals: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, objective: vec![T::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, c: Vec<T>) {
        assert_eq!(c.len(), self.num_vars, "objective length");
        self.objective = c;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint length");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    /// Dense tableau cell count this problem needs.
    pub fn tableau_size(&self) -> usize {
        let m = self.constraints.len();
        (m + 1) * (self.num_vars + 2 * m + 1)
    }

    /// Runs phase one only: the minimal total violation and a minimizer.
    pub fn min_violation(&self) -> (T, Vec<T>) {
        let mut tab = Tableau::build(self);
        let status = tab.phase_one();
        let residual = tab.objective_value();
        let x = tab.primal(self.num_vars);
        debug_assert!(status != LpStatus::Unbounded);
        (residual, x)
    }

    /// Full two-phase solve. `feasibility_tol` bounds the accepted phase-one residual.
    pub fn minimize(&self, feasibility_tol: T) -> LpSolution<T> {
        let mut tab = Tableau::build(self);
        let status = tab.phase_one();
        let residual = tab.objective_value();
        if status == LpStatus::IterationLimit {
            return LpSolution {
                status,
                x: tab.primal(self.num_vars),
                objective: T::zero(),
                phase_one_residual: residual,
                duals: Vec::new(),
            };
        }
        if residual > feasibility_tol {
            return LpSolution {
                status: LpStatus::Infeasible,
                x: tab.primal(self.num_vars),
                objective: T::zero(),
                phase_one_residual: residual,
                duals: Vec::new(),
            };
        }
        tab.drive_out_artificials();
        let status = tab.phase_two(&self.objective);
        let x = tab.primal(self.num_vars);
        let objective = x.iter().zip(&self.objective).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let duals = tab.duals();
        LpSolution { status, x, objective, phase_one_residual: residual, duals }
    }
}

/// Row-major simplex tableau; the last row holds reduced costs.
struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// `(rows + 1) × (cols + 1)`; column `cols` is the right-hand side.
    cells: Vec<T>,
    basis: Vec<usize>,
    artificial_start: usize,
    /// Column holding `+e_i` for row `i`, and whether the row was negated.
    marker: Vec<(usize, bool)>,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.constraints.len();
        let n = lp.num_vars;
        let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let artificial_start = n + slack_count;
        let cols = artificial_start + m;
        let width = cols + 1;
        let mut cells = vec![T::zero(); (m + 1) * width];
        let mut basis = vec![0; m];
        let mut marker = Vec::with_capacity(m);
        let mut slack = n;
        for (i, con) in lp.constraints.iter().enumerate() {
            let flip = con.rhs < T::zero();
            let sign = |v: &T| if flip { -v.clone() } else { v.clone() };
            for j in 0..n {
                cells[i * width + j] = sign(&con.coeffs[j]);
            }
            cells[i * width + cols] = sign(&con.rhs);
            let relation = match (con.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match relation {
                Relation::Le => {
                    cells[i * width + slack] = T::one();
                    basis[i] = slack;
                    marker.push((slack, flip));
                }
                Relation::Ge => {
                    cells[i * width + slack] = -T::one();
                    cells[i * width + artificial_start + i] = T::one();
                    basis[i] = artificial_start + i;
                    marker.push((artificial_start + i, flip));
                }
                Relation::Eq => {
                    cells[i * width + artificial_start + i] = T::one();
                    basis[i] = artificial_start + i;
                    marker.push((artificial_start + i, flip));
                }
            }
            if con.relation != Relation::Eq {
                slack += 1;
            }
        }
        Self { rows: m, cols, cells, basis, artificial_start, marker }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> &T {
        &self.cells[r * self.width() + c]
    }

    fn objective_value(&self) -> T {
        // The cost row stores −z in the rhs column.
        -self.at(self.rows, self.cols).clone()
    }

    fn set_costs(&mut self, costs: &[T]) {
        let w = self.width();
        let obj = self.rows * w;
        for c in 0..w {
            self.cells[obj + c] = if c < costs.len() { costs[c].clone() } else { T::zero() };
        }
        for r in 0..self.rows {
            let cb = self.cells[obj + self.basis[r]].clone();
            if cb == T::zero() {
                continue;
            }
            for c in 0..w {
                let v = self.cells[r * w + c].clone();
                self.cells[obj + c] = self.cells[obj + c].clone() - cb.clone() * v;
            }
        }
    }

    fn phase_one(&mut self) -> LpStatus {
        let mut costs = vec![T::zero(); self.cols];
        for c in costs.iter_mut().skip(self.artificial_start) {
            *c = T::one();
        }
        self.set_costs(&costs);
        let allowed = vec![true; self.cols];
        self.optimize(&allowed)
    }

    fn phase_two(&mut self, objective: &[T]) -> LpStatus {
        let mut costs = objective.to_vec();
        costs.resize(self.cols, T::zero());
        self.set_costs(&costs);
        let allowed: Vec<bool> = (0..self.cols).map(|c| c < self.artificial_start).collect();
        self.optimize(&allowed)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] < self.artificial_start {
                continue;
            }
            let eps = T::eps();
            let entering = (0..self.artificial_start).find(|&c| abs(self.at(r, c)) > eps);
            if let Some(c) = entering {
                self.pivot(r, c);
            }
        }
    }

    fn optimize(&mut self, allowed: &[bool]) -> LpStatus {
        let eps = T::eps();
        let limit = 50_000 + 50 * (self.rows + self.cols);
        let mut stalled = 0usize;
        for _ in 0..limit {
            let use_bland = stalled > 50;
            let mut entering: Option<usize> = None;
            let mut best = -eps.clone();
            for c in 0..self.cols {
                if !allowed[c] {
                    continue;
                }
                let d = self.at(self.rows, c);
                if *d < best || (use_bland && *d < -eps.clone()) {
                    entering = Some(c);
                    if use_bland {
                        break;
                    }
                    best = d.clone();
                }
            }
            let Some(c) = entering else { return LpStatus::Optimal };

            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.rows {
                let a = self.at(r, c);
                if *a > eps {
                    let ratio = self.at(r, self.cols).clone() / a.clone();
                    let better = match &leaving {
                        None => true,
                        Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leaving else { return LpStatus::Unbounded };
            if abs(&ratio) <= eps {
                stalled += 1;
            } else {
                stalled = 0;
            }
            self.pivot(r, c);
        }
        LpStatus::IterationLimit
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.cells[r * w + c].clone();
        for k in 0..w {
            let v = self.cells[r * w + k].clone();
            self.cells[r * w + k] = v / p.clone();
        }
        self.cells[r * w + c] = T::one();
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + c].clone();
            if f == T::zero() {
                continue;
            }
            for k in 0..w {
                let pivot_row = self.cells[r * w + k].clone();
                if pivot_row == T::zero() {
                    continue;
                }
                let v = self.cells[i * w + k].clone();
                self.cells[i * w + k] = v - f.clone() * pivot_row;
            }
            self.cells[i * w + c] = T::zero();
        }
        self.basis[r] = c;
    }

    fn duals(&self) -> Vec<T> {
        self.marker
            .iter()
            .map(|&(col, flipped)| {
                let y = -self.at(self.rows, col).clone();
                if flipped {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    fn primal(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                let v = self.at(r, self.cols).clone();
                x[b] = if v < T::zero() { T::zero() } else { v };
            }
        }
        x
    }
}

fn abs<T: LpScalar>(v: &T) -> T {
    if *v < T::zero() {
        -v.clone()
    } else {
        v.clone()
    }
}

/// Exact rational copy of a float program.
pub fn to_rational(lp: &LinearProgram<f64>) -> LinearProgram<BigRational> {
    let conv = |v: &f64| <BigRational as LpScalar>::from_f64(*v);
    LinearProgram {
        num_vars: lp.num_vars,
        objective: lp.objective.iter().map(conv).collect(),
        constraints: lp
            .constraints
            .iter()
            .map(|c| Constraint { coeffs: c.coeffs.iter().map(conv).collect(), relation: c.relation, rhs: conv(&c.rhs) })
            .collect(),
    }
}

/// True when an exact rational value is zero.
pub fn is_exact_zero(v: &BigRational) -> bool {
    v.is_zero() || v.abs().is_zero()
}
