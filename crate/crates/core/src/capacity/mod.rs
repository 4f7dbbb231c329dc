//! Capacity solvers with certified bounds.
//!
//! Every solver reports a lower bound as `value` and the distance to a
//! matching upper bound as `certified_gap`:
//!
//! - [`ba_capacity`]: Blahut–Arimoto for a stateless channel.
//! - [`compound_capacity_lower`]: `C̲ = max_p min_s I(X;Y|S=s)`.
//! - [`compound_capacity_upper`]: `C̄ = min_s max_p I(X;Y|S=s)`.
//! - [`random_coding_capacity`]: `C_r = max_p min_{q} I(p, Σ_s q(s) W_s)`.

mod blahut;
mod minimax;

use serde::Serialize;

use crate::channels::StateChannel;
use crate::error::{Error, Result};
use crate::probcore::{ChannelMatrix, Distribution};
use minimax::{solve_saddle, CompoundOracle, MixtureOracle};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Target certified gap in bits.
    pub tolerance: f64,
    /// Blahut–Arimoto iteration cap per solve.
    pub max_iterations: usize,
    /// Gap target for Blahut–Arimoto solves nested inside the saddle solvers.
    pub inner_tolerance: f64,
    /// Cutting-plane iteration cap for the saddle solvers.
    pub max_cuts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-5, max_iterations: 100_000, inner_tolerance: 1e-7, max_cuts: 500 }
    }
}

impl SolverConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, inner_tolerance: (tolerance / 100.0).min(1e-7), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.inner_tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iterations == 0 || self.max_cuts == 0 {
            return Err(Error::InvalidConfig("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Where the minimizing player ends up.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateOptimizer {
    /// A single worst state.
    Index(usize),
    /// A worst state distribution `p⋆(s)`.
    Mixture(Distribution),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub value: f64,
    pub optimizer_input: Distribution,
    pub optimizer_state: Option<StateOptimizer>,
    pub converged: bool,
    pub iterations: usize,
    pub certified_gap: f64,
    /// Every state whose value is within tolerance of the minimum, when that
    /// notion applies. More than one entry means the optimizer is not unique.
    pub minimizing_states: Vec<usize>,
}

impl CapacityResult {
    pub fn upper_bound(&self) -> f64 {
        self.value + self.certified_gap
    }

    fn zero(ch: &StateChannel, state: Option<StateOptimizer>) -> Self {
        Self {
            value: 0.0,
            optimizer_input: Distribution::uniform(ch.inputs()),
            optimizer_state: state,
            converged: true,
            iterations: 0,
            certified_gap: 0.0,
            minimizing_states: (0..ch.states()).collect(),
        }
    }
}

fn input_distribution(p: Vec<f64>) -> Distribution {
    Distribution::from_weights(&p).expect("solver inputs are nonnegative with positive mass")
}

/// Capacity of a stateless channel.
pub fn ba_capacity(ch: &StateChannel, cfg: &SolverConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    if ch.states() != 1 {
        return Err(Error::ModelMismatch(format!("expected a stateless channel, got {} states", ch.states())));
    }
    Ok(ba_on_matrix(&ch.slice(0), cfg, None))
}

fn ba_on_matrix(m: &ChannelMatrix<'_>, cfg: &SolverConfig, state: Option<StateOptimizer>) -> CapacityResult {
    let out = blahut::blahut_arimoto(m, cfg.tolerance, cfg.max_iterations, None);
    CapacityResult {
        value: out.lower,
        optimizer_input: input_distribution(out.input),
        optimizer_state: state,
        converged: out.converged,
        iterations: out.iterations,
        certified_gap: (out.upper - out.lower).max(0.0),
        minimizing_states: vec![0],
    }
}

/// `C̲ = max_p min_s I(X;Y|S=s)`.
///
/// `optimizer_state` is the lowest-index state attaining the minimum at the
/// returned input.
pub fn compound_capacity_lower(ch: &StateChannel, cfg: &SolverConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    if ch.is_degenerate(1e-9) {
        return Ok(CapacityResult::zero(ch, Some(StateOptimizer::Index(0))));
    }
    if ch.states() == 1 {
        let mut res = ba_capacity(ch, cfg)?;
        res.optimizer_state = Some(StateOptimizer::Index(0));
        return Ok(res);
    }
    let oracle = CompoundOracle { slices: (0..ch.states()).map(|s| ch.slice(s)).collect() };
    let out = solve_saddle(&oracle, cfg);
    let per_state: Vec<f64> =
        (0..ch.states()).map(|s| crate::probcore::mutual_information_raw(&out.input, &ch.slice(s))).collect();
    let min = per_state.iter().cloned().fold(f64::INFINITY, f64::min);
    let minimizing: Vec<usize> = (0..ch.states()).filter(|&s| per_state[s] <= min + cfg.tolerance).collect();
    Ok(CapacityResult {
        value: out.lower,
        optimizer_input: input_distribution(out.input),
        optimizer_state: Some(StateOptimizer::Index(minimizing[0])),
        converged: out.converged,
        iterations: out.iterations,
        certified_gap: (out.upper - out.lower).max(0.0),
        minimizing_states: minimizing,
    })
}

/// `C̄ = min_s max_p I(X;Y|S=s)`, reporting the lowest-index minimizing state `s⋆`.
pub fn compound_capacity_upper(ch: &StateChannel, cfg: &SolverConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    if ch.is_degenerate(1e-9) {
        return Ok(CapacityResult::zero(ch, Some(StateOptimizer::Index(0))));
    }
    let per_state: Vec<CapacityResult> = (0..ch.states()).map(|s| ba_on_matrix(&ch.slice(s), cfg, None)).collect();
    let min_lower = per_state.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let min_upper = per_state.iter().map(|r| r.upper_bound()).fold(f64::INFINITY, f64::min);
    let star = per_state.iter().position(|r| r.value == min_lower).expect("nonempty state alphabet");
    let minimizing: Vec<usize> =
        (0..ch.states()).filter(|&s| per_state[s].value <= min_lower + cfg.tolerance).collect();
    let best = &per_state[star];
    Ok(CapacityResult {
        value: min_lower,
        optimizer_input: best.optimizer_input.clone(),
        optimizer_state: Some(StateOptimizer::Index(star)),
        converged: per_state.iter().all(|r| r.converged),
        iterations: per_state.iter().map(|r| r.iterations).sum(),
        certified_gap: (min_upper - min_lower).max(0.0),
        minimizing_states: minimizing,
    })
}

/// `C_r = max_p min_{q} I(p, W_q)`, reporting the worst mixture `p⋆(s)`.
pub fn random_coding_capacity(ch: &StateChannel, cfg: &SolverConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    if ch.is_degenerate(1e-9) {
        return Ok(CapacityResult::zero(ch, Some(StateOptimizer::Mixture(Distribution::uniform(ch.states())))));
    }
    if ch.states() == 1 {
        let mut res = ba_capacity(ch, cfg)?;
        res.optimizer_state = Some(StateOptimizer::Mixture(Distribution::uniform(1)));
        return Ok(res);
    }
    let out = solve_saddle(&MixtureOracle { channel: ch }, cfg);
    Ok(CapacityResult {
        value: out.lower.max(0.0),
        optimizer_input: input_distribution(out.input),
        optimizer_state: Some(StateOptimizer::Mixture(input_distribution(out.state))),
        converged: out.converged,
        iterations: out.iterations,
        certified_gap: (out.upper - out.lower.max(0.0)).max(0.0),
        minimizing_states: Vec::new(),
    })
}
