//! Positive-rate pair sets by monotone closure.
//!
//! Starting from the diagonal, a pair `(u, v)` is added once the channel
//! from node `u` to the nodes `𝒜 = {j : (j, v) ∈ 𝒫}` can carry positive
//! rate (plain and CC analysis) or is non-symmetrizable (AVC analysis).
//! Because the network is a product of independent edges, that channel is
//! the product of the edges from `u` into `𝒜`; the inputs of every other
//! node only drive channels whose outputs are independent of `X^(u)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{StateChannel, StateModelTag};
use crate::error::{Error, Result};
use crate::network::{Edge, NetworkSpec};
use crate::symmetrizability::{symmetrizable_of_order, SymmetrizabilityConfig};

/// Rows closer than this are the same distribution.
pub const ROW_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSet {
    nodes: usize,
    pairs: BTreeSet<(usize, usize)>,
    /// Pairs the add-condition could not decide within the size caps.
    unknown: BTreeSet<(usize, usize)>,
}

impl PairSet {
    pub fn diagonal(nodes: usize) -> Self {
        Self { nodes, pairs: (1..=nodes).map(|u| (u, u)).collect(), unknown: BTreeSet::new() }
    }

    pub fn from_pairs(nodes: usize, extra: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut set = Self::diagonal(nodes);
        set.pairs.extend(extra);
        set
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.contains(&(u, v))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn unknown(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.unknown.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Off-diagonal pairs.
    pub fn off_diagonal(&self) -> Vec<(usize, usize)> {
        self.pairs().filter(|(u, v)| u != v).collect()
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn intersection(&self, other: &PairSet) -> PairSet {
        let pairs: BTreeSet<_> = self.pairs.intersection(&other.pairs).copied().collect();
        let unknown = self.unknown.union(&other.unknown).filter(|p| !pairs.contains(p)).copied().collect();
        PairSet { nodes: self.nodes, pairs, unknown }
    }

    /// `u: v1 v2 …` per source node.
    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = (1..=self.nodes).map(|u| (u, Vec::new())).collect();
        for (u, v) in self.pairs() {
            out.entry(u).or_default().push(v);
        }
        out
    }
}

/// Sweep order of the closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureOrder {
    Lexicographic,
    Shuffled(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decision {
    Positive,
    Zero,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReachConfig {
    /// Largest dense LP accepted for joint-channel symmetrizability checks.
    pub max_lp_cells: usize,
    /// Cap on the tensor of a joint channel.
    pub max_product_entries: usize,
    /// Cap on enumerated state combinations in CC analysis.
    pub max_state_combinations: usize,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self { max_lp_cells: 4_000_000, max_product_entries: 1_000_000, max_state_combinations: 4096 }
    }
}

fn closure(nodes: usize, order: ClosureOrder, mut decide: impl FnMut(usize, &BTreeSet<usize>) -> Result<Decision>) -> Result<PairSet> {
    let mut set = PairSet::diagonal(nodes);
    let mut candidates: Vec<(usize, usize)> =
        (1..=nodes).flat_map(|u| (1..=nodes).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
    let mut rng = match order {
        ClosureOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        ClosureOrder::Lexicographic => None,
    };
    loop {
        if let Some(r) = rng.as_mut() {
            candidates.shuffle(r);
        }
        let mut changed = false;
        let mut unknown = BTreeSet::new();
        for &(u, v) in &candidates {
            if set.contains(u, v) {
                continue;
            }
            let a: BTreeSet<usize> = (1..=nodes).filter(|&j| set.contains(j, v)).collect();
            match decide(u, &a)? {
                Decision::Positive => {
                    set.pairs.insert((u, v));
                    changed = true;
                }
                Decision::Unknown => {
                    unknown.insert((u, v));
                }
                Decision::Zero => {}
            }
        }
        if !changed {
            set.unknown = unknown;
            return Ok(set);
        }
    }
}

fn edges_into<'a>(net: &'a NetworkSpec, u: usize, a: &'a BTreeSet<usize>) -> impl Iterator<Item = (usize, &'a Edge)> + 'a {
    net.edges().iter().enumerate().filter(move |(_, e)| e.from == u && a.contains(&e.to))
}

/// Channel used by reachability for an edge: bit-pipes are binary or unary identities.
fn stateless_distinct(ch: &StateChannel) -> bool {
    ch.slice(0).rows_distinct(ROW_TOL)
}

/// `𝒫_s`: the closure with every stateful edge fixed to the given state.
///
/// `assignment` maps edge labels to states and must cover every stateful edge.
pub fn positive_rate_set(net: &NetworkSpec, assignment: &BTreeMap<String, usize>) -> Result<PairSet> {
    positive_rate_set_ordered(net, assignment, ClosureOrder::Lexicographic)
}

pub fn positive_rate_set_ordered(
    net: &NetworkSpec,
    assignment: &BTreeMap<String, usize>,
    order: ClosureOrder,
) -> Result<PairSet> {
    let fixed = fixed_channels(net, assignment)?;
    let positive: Vec<bool> = fixed.iter().map(stateless_distinct).collect();
    closure(net.nodes(), order, |u, a| {
        let any = edges_into(net, u, a).any(|(i, _)| positive[i]);
        Ok(if any { Decision::Positive } else { Decision::Zero })
    })
}

fn fixed_channels(net: &NetworkSpec, assignment: &BTreeMap<String, usize>) -> Result<Vec<StateChannel>> {
    net.edges()
        .iter()
        .map(|e| {
            if e.channel.states() == 1 {
                return Ok(e.channel.clone());
            }
            let s = assignment.get(&e.label).ok_or_else(|| {
                Error::InvalidParameter(format!("no state assigned to stateful edge `{}`", e.label))
            })?;
            e.channel.fix_state(*s)
        })
        .collect()
}

/// `𝒫_CC = ⋂_s 𝒫_s` over every combination of states of the stateful edges.
pub fn positive_rate_set_cc(net: &NetworkSpec) -> Result<PairSet> {
    positive_rate_set_cc_with(net, &ReachConfig::default())
}

pub fn positive_rate_set_cc_with(net: &NetworkSpec, cfg: &ReachConfig) -> Result<PairSet> {
    if let Some((_, e)) = net.stateful_edges().find(|(_, e)| e.model == StateModelTag::Avc) {
        return Err(Error::ModelMismatch(format!("edge `{}` carries AVC state; CC analysis needs CC or stateless edges", e.label)));
    }
    let stateful: Vec<&Edge> = net.stateful_edges().map(|(_, e)| e).collect();
    let combos = stateful.iter().try_fold(1usize, |acc, e| acc.checked_mul(e.channel.states()));
    let combos = combos.unwrap_or(usize::MAX);
    if combos > cfg.max_state_combinations {
        return Err(Error::SizeExceeded { what: "state combinations".into(), needed: combos, cap: cfg.max_state_combinations });
    }
    let mut result: Option<PairSet> = None;
    for mut idx in 0..combos {
        let mut assignment = BTreeMap::new();
        for e in stateful.iter().rev() {
            let k = e.channel.states();
            assignment.insert(e.label.clone(), idx % k);
            idx /= k;
        }
        let ps = positive_rate_set(net, &assignment)?;
        result = Some(match result {
            None => ps,
            Some(acc) => acc.intersection(&ps),
        });
    }
    Ok(result.unwrap_or_else(|| PairSet::diagonal(net.nodes())))
}

/// `𝒫_AVC`: the closure under non-symmetrizability.
pub fn positive_rate_set_avc(net: &NetworkSpec) -> Result<PairSet> {
    positive_rate_set_avc_with(net, &ReachConfig::default(), ClosureOrder::Lexicographic)
}

pub fn positive_rate_set_avc_with(net: &NetworkSpec, cfg: &ReachConfig, order: ClosureOrder) -> Result<PairSet> {
    if let Some((_, e)) = net.stateful_edges().find(|(_, e)| e.model == StateModelTag::Cc) {
        return Err(Error::ModelMismatch(format!("edge `{}` carries CC state; AVC analysis needs AVC or stateless edges", e.label)));
    }
    let sym_cfg = SymmetrizabilityConfig { max_lp_cells: cfg.max_lp_cells, ..Default::default() };
    // Per-edge verdicts: stateless edges by row distinctness, stateful ones by the LP.
    let mut per_edge: Vec<Decision> = Vec::with_capacity(net.edges().len());
    for e in net.edges() {
        per_edge.push(if !e.is_stateful() {
            if stateless_distinct(&e.channel) {
                Decision::Positive
            } else {
                Decision::Zero
            }
        } else {
            match symmetrizable_of_order(&e.channel, 1, &sym_cfg) {
                Ok(c) if c.feasible => Decision::Zero,
                Ok(_) => Decision::Positive,
                Err(Error::SizeExceeded { .. }) => Decision::Unknown,
                Err(err) => return Err(err),
            }
        });
    }
    closure(net.nodes(), order, |u, a| {
        let edges: Vec<(usize, &Edge)> = edges_into(net, u, a).collect();
        if edges.iter().any(|(i, _)| per_edge[*i] == Decision::Positive) {
            return Ok(Decision::Positive);
        }
        if !edges.iter().any(|(_, e)| e.is_stateful()) {
            return Ok(Decision::Zero);
        }
        joint_decision(&edges, cfg, &sym_cfg)
    })
}

/// Symmetrizability of the product of `edges`, when it fits the caps.
fn joint_decision(edges: &[(usize, &Edge)], cfg: &ReachConfig, sym_cfg: &SymmetrizabilityConfig) -> Result<Decision> {
    let mut joint: Option<StateChannel> = None;
    for (_, e) in edges {
        joint = Some(match joint {
            None => e.channel.clone(),
            Some(j) => match j.product_with_cap(&e.channel, cfg.max_product_entries) {
                Ok(p) => p,
                Err(Error::SizeExceeded { .. }) => return Ok(Decision::Unknown),
                Err(err) => return Err(err),
            },
        });
    }
    let joint = joint.expect("at least one edge");
    match symmetrizable_of_order(&joint, 1, sym_cfg) {
        Ok(c) if c.feasible => Ok(Decision::Zero),
        Ok(_) => Ok(Decision::Positive),
        Err(Error::SizeExceeded { .. }) => Ok(Decision::Unknown),
        Err(err) => Err(err),
    }
}

/// Pairs `(u, v)` with `v` reachable from `u` along edges with distinct rows.
pub fn relay_paths(net: &NetworkSpec, assignment: &BTreeMap<String, usize>) -> Result<PairSet> {
    let fixed = fixed_channels(net, assignment)?;
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (e, ch) in net.edges().iter().zip(&fixed) {
        if stateless_distinct(ch) {
            adj.entry(e.from).or_default().push(e.to);
        }
    }
    let mut set = PairSet::diagonal(net.nodes());
    for u in 1..=net.nodes() {
        let mut stack = vec![u];
        let mut seen = BTreeSet::from([u]);
        while let Some(w) = stack.pop() {
            for &next in adj.get(&w).into_iter().flatten() {
                if seen.insert(next) {
                    set.pairs.insert((u, next));
                    stack.push(next);
                }
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::catalog::*;

    fn none() -> BTreeMap<String, usize> {
        BTreeMap::new()
    }

    #[test]
    fn single_pipe() {
        let net = NetworkSpec::new(2, vec![Edge::bitpipe(1, 2, "a", 1.0).unwrap()], None).unwrap();
        let p = positive_rate_set(&net, &none()).unwrap();
        assert_eq!(p.off_diagonal(), vec![(1, 2)]);
    }

    #[test]
    fn useless_edge() {
        let flat = constant_rows(2, &[0.5, 0.5]).unwrap();
        let net = NetworkSpec::new(2, vec![Edge::channel(1, 2, "a", StateModelTag::None, flat)], None).unwrap();
        assert!(positive_rate_set(&net, &none()).unwrap().off_diagonal().is_empty());
    }

    #[test]
    fn line_closure() {
        let net = NetworkSpec::new(
            3,
            vec![Edge::bitpipe(1, 2, "a", 1.0).unwrap(), Edge::bitpipe(2, 3, "b", 1.0).unwrap()],
            None,
        )
        .unwrap();
        let p = positive_rate_set(&net, &none()).unwrap();
        assert_eq!(p.off_diagonal(), vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn cc_intersection() {
        // Edge 2→1 works in state 0 only.
        let ch = StateChannel::from_nested(&[
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        ])
        .unwrap();
        let net = NetworkSpec::new(2, vec![Edge::channel(2, 1, "c", StateModelTag::Cc, ch)], None).unwrap();
        let p0 = positive_rate_set(&net, &BTreeMap::from([("c".to_string(), 0)])).unwrap();
        assert!(p0.contains(2, 1));
        let cc = positive_rate_set_cc(&net).unwrap();
        assert!(!cc.contains(2, 1));
        assert!(cc.is_subset(&p0));
    }

    #[test]
    fn avc_cases() {
        let sym = NetworkSpec::new(2, vec![Edge::channel(1, 2, "j", StateModelTag::Avc, adder_avc())], None).unwrap();
        assert!(positive_rate_set_avc(&sym).unwrap().off_diagonal().is_empty());
        let nonsym = compound_bsc(&[0.1, 0.2]).unwrap();
        let net = NetworkSpec::new(2, vec![Edge::channel(1, 2, "j", StateModelTag::Avc, nonsym)], None).unwrap();
        assert_eq!(positive_rate_set_avc(&net).unwrap().off_diagonal(), vec![(1, 2)]);
    }
}
