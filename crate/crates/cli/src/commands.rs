//! Command definitions and their reports.

use std::collections::BTreeMap;
use std::path::PathBuf;

use advnet::capacity::{
    compound_capacity_lower, compound_capacity_upper, random_coding_capacity, CapacityResult, SolverConfig,
};
use advnet::equivalence::{edge_removal, equivalent_rate, EquivalenceVerdict, VerdictBasis};
use advnet::network::{Edge, NetworkSpec};
use advnet::reachability::{positive_rate_set, positive_rate_set_avc, positive_rate_set_cc, PairSet};
use advnet::regions::{bitpipe_region, no_equivalent_bitpipe, proposition1_region, regions_equal, RateRegion, VERTEX_TOL};
use advnet::simulate::{
    run_avc_common_randomness_experiment, run_cc_feedback_protocol, run_hash_protocol, run_training_estimator,
    AdversaryStrategy, AvcExperiment, FeedbackExperiment, HashExperiment, ListOracle,
};
use advnet::symmetrizability::symmetrizability_order;
use advnet::Distribution;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::netfile;
use crate::report::Report;
use crate::{CliError, EXIT_NOT_CONVERGED, EXIT_UNDETERMINED};

#[derive(Debug, Parser)]
#[command(name = "advnet", version, about = "Equivalence and capacity analysis for networks of channels with state")]
pub struct Cli {
    /// Machine-readable output with the same fields as the text report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity of the designated (or named) edge.
    Capacity {
        file: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        edge: Option<String>,
    },
    /// Symmetrizability order of the designated (or named) edge.
    Symmetrize {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_order: usize,
        #[arg(long)]
        edge: Option<String>,
    },
    /// Positive-rate pair set.
    Reach {
        file: PathBuf,
        #[arg(long, value_enum)]
        model: ReachModel,
        /// `label=state` for each stateful edge (plain model only).
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Equivalent bit-pipe rate of the designated edge.
    Equiv {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Rate region of the three-node relay example.
    Region(RegionArgs),
    /// Seeded Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Equivalent rate with and without a small bit-pipe.
    EdgeRemoval {
        file: PathBuf,
        #[arg(long)]
        edge: String,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Re-emits a network file in normalized form.
    Export { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Lower,
    Upper,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReachModel {
    Plain,
    Cc,
    Avc,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub r2: f64,
    #[arg(long)]
    pub cr: f64,
    #[arg(long)]
    pub m: usize,
    /// Compare against the bit-pipe region of this rate.
    #[arg(long)]
    pub rtilde: Option<f64>,
    /// Sweep bit-pipe rates at this step.
    #[arg(long)]
    pub sweep: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Seeded {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub trials: u64,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Maximum-likelihood state estimation from a training sequence.
    Training {
        file: PathBuf,
        #[arg(long)]
        true_state: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edge: Option<String>,
        #[command(flatten)]
        run: Seeded,
    },
    /// Training, state feedback and coding over a CC.
    Feedback {
        file: PathBuf,
        /// Defaults to the midpoint of the lower and upper compound capacities.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = 100)]
        n1: usize,
        #[arg(long, default_value_t = 1)]
        n2: usize,
        #[arg(long, default_value_t = 400)]
        n3: usize,
        /// Every state is run, and the worst reported, when omitted.
        #[arg(long)]
        true_state: Option<usize>,
        #[arg(long)]
        no_feedback: bool,
        #[arg(long)]
        edge: Option<String>,
        #[command(flatten)]
        run: Seeded,
    },
    /// Symmetrizing attack against deterministic and seed-selected codes.
    Avc {
        file: PathBuf,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        n: usize,
        /// Number of codebooks; defaults to the required count.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// `spoofing`, `constant:S` or `iid:p0,p1,...`.
        #[arg(long, default_value = "spoofing")]
        adversary: String,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(long)]
        edge: Option<String>,
        #[command(flatten)]
        run: Seeded,
    },
    /// Hash disambiguation of a decoded list over GF(2^q).
    Hash {
        #[arg(long, default_value_t = 8)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = OracleArg::Adversarial)]
        oracle: OracleArg,
        #[command(flatten)]
        run: Seeded,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Adversarial,
    Single,
    Random,
}

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Capacity { file, which, tol, edge } => capacity(&netfile::load(file)?, *which, *tol, edge.as_deref()),
        Command::Symmetrize { file, max_order, edge } => symmetrize(&netfile::load(file)?, *max_order, edge.as_deref()),
        Command::Reach { file, model, states } => reach(&netfile::load(file)?, *model, states),
        Command::Equiv { file, tol } => equiv(&netfile::load(file)?, *tol),
        Command::Region(args) => region(args),
        Command::Simulate { experiment } => simulate(experiment),
        Command::EdgeRemoval { file, edge, delta, tol } => removal(&netfile::load(file)?, edge, *delta, *tol),
        Command::Export { file } => {
            let spec = netfile::load(file)?;
            let value: serde_json::Value = serde_json::from_str(&netfile::emit(&spec)).expect("emitted JSON parses");
            Ok(Report::new(format!("{} nodes, {} edges", spec.nodes(), spec.edges().len())).with("network", value))
        }
    }
}

fn solver(tol: f64) -> Result<SolverConfig, CliError> {
    let cfg = SolverConfig::with_tolerance(tol);
    cfg.validate()?;
    Ok(cfg)
}

fn pick_edge<'a>(net: &'a NetworkSpec, label: Option<&str>) -> Result<&'a Edge, CliError> {
    match label {
        Some(l) => Ok(net.edge(l)?),
        None => net.designated_edge().map_err(|_| CliError::Input("no designated edge; pass --edge".into())),
    }
}

fn converged_exit(ok: bool) -> i32 {
    if ok {
        0
    } else {
        EXIT_NOT_CONVERGED
    }
}

pub fn capacity(net: &NetworkSpec, which: Which, tol: f64, label: Option<&str>) -> Result<Report, CliError> {
    let edge = pick_edge(net, label)?;
    let cfg = solver(tol)?;
    let (name, r): (&str, CapacityResult) = match which {
        Which::Lower => ("C_lower", compound_capacity_lower(&edge.channel, &cfg)?),
        Which::Upper => ("C_upper", compound_capacity_upper(&edge.channel, &cfg)?),
        Which::Random => ("C_r", random_coding_capacity(&edge.channel, &cfg)?),
    };
    let summary = format!("{name} = {:.6} (certified gap {:.2e})", r.value, r.certified_gap);
    Ok(Report::new(summary)
        .with("edge", &edge.label)
        .with("which", format!("{which:?}").to_lowercase())
        .merge(&r)
        .with("upper_bound", r.upper_bound())
        .exit(converged_exit(r.converged)))
}

pub fn symmetrize(net: &NetworkSpec, max_order: usize, label: Option<&str>) -> Result<Report, CliError> {
    let edge = pick_edge(net, label)?;
    let ord = symmetrizability_order(&edge.channel, max_order)?;
    let summary = match (ord.order, ord.cap_reached) {
        (0, _) => "order 0".to_string(),
        (m, true) => format!("order >= {m} (cap reached)"),
        (m, false) => format!("order {m}"),
    };
    Ok(Report::new(summary)
        .with("edge", &edge.label)
        .with("order", ord.order)
        .with("cap", max_order)
        .with("cap_reached", ord.cap_reached)
        .with("max_violation", ord.max_violation)
        .with("witness", &ord.witness))
}

fn parse_assignment(states: &[String]) -> Result<BTreeMap<String, usize>, CliError> {
    states
        .iter()
        .map(|s| {
            let (label, idx) = s.split_once('=').ok_or_else(|| CliError::Input(format!("--state `{s}` is not label=index")))?;
            let idx = idx.parse().map_err(|_| CliError::Input(format!("--state `{s}`: bad state index")))?;
            Ok((label.to_string(), idx))
        })
        .collect()
}

fn pair_report(summary: String, p: &PairSet) -> Report {
    let pairs: Vec<[usize; 2]> = p.pairs().map(|(u, v)| [u, v]).collect();
    let unknown: Vec<[usize; 2]> = p.unknown().map(|(u, v)| [u, v]).collect();
    let adjacency: Vec<String> = p
        .adjacency()
        .iter()
        .map(|(u, vs)| format!("{u} -> {}", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")))
        .collect();
    Report::new(summary).with("pairs", pairs).with("adjacency", adjacency).with("unknown", unknown)
}

pub fn reach(net: &NetworkSpec, model: ReachModel, states: &[String]) -> Result<Report, CliError> {
    let p = match model {
        ReachModel::Plain => positive_rate_set(net, &parse_assignment(states)?)?,
        ReachModel::Cc => positive_rate_set_cc(net)?,
        ReachModel::Avc => positive_rate_set_avc(net)?,
    };
    let summary = format!("{} pairs ({} off-diagonal), {} unknown", p.len(), p.off_diagonal().len(), p.unknown().count());
    Ok(pair_report(summary, &p).with("model", format!("{model:?}").to_lowercase()))
}

fn verdict_summary(v: &EquivalenceVerdict) -> String {
    let ev = &v.evidence;
    let rate = v.rate_bits.map(|r| format!("{r:.6}")).unwrap_or_default();
    match v.basis {
        VerdictBasis::CcFeedback => format!("C_upper = {rate} via feedback path ({} to {})", ev.to, ev.from),
        VerdictBasis::CcNoFeedback => format!("C_lower = {rate} (no feedback path)"),
        VerdictBasis::AvcNonsym => format!("C_r = {rate} (non-symmetrizable)"),
        VerdictBasis::AvcCommonRandomness => {
            format!("C_r = {rate} via common randomness (u={})", ev.common_source.unwrap_or_default())
        }
        VerdictBasis::AvcSymmetrizableIsolated => "0 (symmetrizable, no other edges)".to_string(),
        VerdictBasis::Undetermined => {
            format!("undetermined (at most {:.6})", ev.upper_bound.unwrap_or(f64::NAN))
        }
    }
}

fn verdict_fields(v: &EquivalenceVerdict) -> serde_json::Value {
    let ev = &v.evidence;
    let value = |r: &Option<CapacityResult>| r.as_ref().map(|r| r.value);
    json!({
        "edge": ev.edge,
        "model": v.model,
        "basis": v.basis,
        "rate_bits": v.rate_bits,
        "compound_lower": value(&ev.compound_lower),
        "compound_upper": value(&ev.compound_upper),
        "random_coding": value(&ev.random_coding),
        "symmetrizable": ev.symmetrizable,
        "common_source": ev.common_source,
        "upper_bound": ev.upper_bound,
        "pair_set": ev.pair_set.pairs().map(|(u, w)| [u, w]).collect::<Vec<_>>(),
        "pair_set_excludes_edge": ev.pair_set_excludes_edge,
        "converged": v.converged(),
    })
}

fn verdict_exit(v: &EquivalenceVerdict) -> i32 {
    if !v.is_determined() {
        EXIT_UNDETERMINED
    } else {
        converged_exit(v.converged())
    }
}

pub fn equiv(net: &NetworkSpec, tol: f64) -> Result<Report, CliError> {
    let v = equivalent_rate(net, &solver(tol)?)?;
    Ok(Report::new(verdict_summary(&v)).merge(verdict_fields(&v)).exit(verdict_exit(&v)))
}

pub fn removal(net: &NetworkSpec, label: &str, delta: f64, tol: f64) -> Result<Report, CliError> {
    let r = edge_removal(net, label, delta, &solver(tol)?)?;
    let gap = r.gap().ok();
    let summary = match gap {
        Some(g) => format!("removing `{label}` (rate {delta}) lowers the equivalent rate by {g:.6}"),
        None => format!("removing `{label}`: {} with, {} without", verdict_summary(&r.with_edge), verdict_summary(&r.without_edge)),
    };
    let exit = verdict_exit(&r.with_edge).max(verdict_exit(&r.without_edge));
    Ok(Report::new(summary)
        .with("removed_edge", label)
        .with("delta", delta)
        .with("with_edge", verdict_fields(&r.with_edge))
        .with("without_edge", verdict_fields(&r.without_edge))
        .with("gap", gap)
        .with("gap_exceeds_delta", gap.map(|g| g > delta))
        .exit(exit))
}

fn region_lines(r: &RateRegion) -> Vec<String> {
    r.to_string().lines().map(str::to_string).collect()
}

pub fn region(a: &RegionArgs) -> Result<Report, CliError> {
    let target = proposition1_region(a.r1, a.r2, a.cr, a.m)?;
    let mut report = Report::new(format!("{} inequalities, {} vertices", target.inequalities.len(), target.vertices().len()))
        .with("inequalities", region_lines(&target))
        .with("vertices", target.vertices());
    if let Some(rt) = a.rtilde {
        let pipe = bitpipe_region(a.r1, a.r2, rt)?;
        report = report.with(
            "bitpipe",
            json!({
                "rtilde": rt,
                "inequalities": region_lines(&pipe),
                "vertices": pipe.vertices(),
                "equal": regions_equal(&target, &pipe, VERTEX_TOL)?,
            }),
        );
    }
    if let Some(step) = a.sweep {
        report = report.with("sweep", no_equivalent_bitpipe(a.r1, a.r2, a.cr, a.m, step)?);
    }
    Ok(report)
}

fn load_edge(file: &PathBuf, label: Option<&str>) -> Result<advnet::StateChannel, CliError> {
    let net = netfile::load(file)?;
    Ok(pick_edge(&net, label)?.channel.clone())
}

fn parse_adversary(s: &str, target: usize) -> Result<AdversaryStrategy, CliError> {
    let bad = || CliError::Input(format!("--adversary `{s}`: expected spoofing, constant:S or iid:p0,p1,..."));
    match s.split_once(':') {
        None if s == "spoofing" => Ok(AdversaryStrategy::Spoofing { target_codebook: target }),
        Some(("constant", v)) => Ok(AdversaryStrategy::ConstantState(v.parse().map_err(|_| bad())?)),
        Some(("iid", v)) => {
            let probs = v.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
            Ok(AdversaryStrategy::IidState(Distribution::new(probs)?))
        }
        _ => Err(bad()),
    }
}

pub fn simulate(exp: &Experiment) -> Result<Report, CliError> {
    match exp {
        Experiment::Training { file, true_state, n, edge, run } => {
            let ch = load_edge(file, edge.as_deref())?;
            let r = run_training_estimator(&ch, *true_state, *n, run.trials, run.seed)?;
            Ok(Report::new(format!("state misestimated in {} of {} trials", r.failures, r.trials)).merge(&r))
        }
        Experiment::Feedback { file, rate, n1, n2, n3, true_state, no_feedback, edge, run } => {
            let ch = load_edge(file, edge.as_deref())?;
            let cfg = SolverConfig::default();
            let lower = compound_capacity_lower(&ch, &cfg)?;
            let upper = compound_capacity_upper(&ch, &cfg)?;
            let rate = rate.unwrap_or(lower.value + 0.5 * (upper.value - lower.value));
            let states: Vec<usize> = match true_state {
                Some(s) => vec![*s],
                None => (0..ch.states()).collect(),
            };
            let mut worst = None;
            let mut per_state = Vec::new();
            for s in states {
                let e = FeedbackExperiment {
                    rate,
                    n1: *n1,
                    n2: *n2,
                    n3: *n3,
                    true_state: s,
                    feedback: !no_feedback,
                    trials: run.trials,
                    seed: run.seed,
                };
                let r = run_cc_feedback_protocol(&ch, &e)?;
                per_state.push(json!({"true_state": s, "failures": r.report.failures, "wilson_upper_95": r.report.wilson_upper_95}));
                if worst.as_ref().map_or(true, |(_, w): &(usize, advnet::simulate::FeedbackReport)| r.report.failures > w.report.failures) {
                    worst = Some((s, r));
                }
            }
            let (state, r) = worst.expect("at least one state");
            let arm = if *no_feedback { "without feedback" } else { "with feedback" };
            Ok(Report::new(format!("rate {rate:.6} {arm}: worst state {state} fails {} of {}", r.report.failures, r.report.trials))
                .merge(&r.report)
                .with("rate", rate)
                .with("feedback", !no_feedback)
                .with("worst_true_state", state)
                .with("message_bits", r.message_bits)
                .with("design_state_without_feedback", r.worst_state)
                .with("estimate_mismatches", r.estimate_mismatches)
                .with("compound_lower", lower.value)
                .with("compound_upper", upper.value)
                .with("per_state", per_state)
                .exit(converged_exit(lower.converged && upper.converged)))
        }
        Experiment::Avc { file, rate, n, seeds, epsilon, adversary, target, edge, run } => {
            let ch = load_edge(file, edge.as_deref())?;
            let required = advnet::simulate::seeds_required(*n, *rate, ch.states(), *epsilon).ceil().max(1.0) as u64;
            let e = AvcExperiment {
                rate: *rate,
                n: *n,
                num_seeds: seeds.unwrap_or(required),
                epsilon: *epsilon,
                adversary: parse_adversary(adversary, *target)?,
                trials: run.trials,
                seed: run.seed,
            };
            let r = run_avc_common_randomness_experiment(&ch, &e)?;
            Ok(Report::new(format!(
                "deterministic code fails {} of {}; shared seed (K = {}) fails {}",
                r.deterministic.failures, r.deterministic.trials, e.num_seeds, r.shared.failures
            ))
            .with("num_seeds", e.num_seeds)
            .merge(&r))
        }
        Experiment::Hash { q, k1, k2, m, oracle, run } => {
            let oracle = match oracle {
                OracleArg::Adversarial => ListOracle::Adversarial,
                OracleArg::Single => ListOracle::SingleCoordinate,
                OracleArg::Random => ListOracle::Random,
            };
            let e = HashExperiment { q: *q, k1: *k1, k2: *k2, m: *m, oracle, trials: run.trials, seed: run.seed };
            let r = run_hash_protocol(&e)?;
            Ok(Report::new(format!(
                "decode error {:.6} (Wilson upper {:.6}) against bound {:.6}",
                r.report.error_rate, r.report.wilson_upper_95, r.bound
            ))
            .merge(&r.report)
            .with("bound", r.bound)
            .with("within_bound", r.report.error_rate <= r.bound))
        }
    }
}
