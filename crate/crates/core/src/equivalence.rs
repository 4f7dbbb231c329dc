//! Equivalent bit-pipe rates for a designated state channel.
//!
//! CC edges: if the rest of the network can send positive rate from the
//! edge's head back to its tail, the edge is worth `C̄`, otherwise `C̲`.
//! AVC edges: worth `C_r` when the channel is non-symmetrizable or when
//! some node reaches both endpoints in `𝒫_AVC`; otherwise no fixed rate is
//! asserted and `C_r` is kept as an upper bound.

use serde::Serialize;

use crate::capacity::{
    compound_capacity_lower, compound_capacity_upper, random_coding_capacity, CapacityResult, SolverConfig,
};
use crate::channels::StateModelTag;
use crate::error::{Error, Result};
use crate::network::{Edge, NetworkSpec};
use crate::reachability::{positive_rate_set_avc, positive_rate_set_cc, PairSet};
use crate::symmetrizability::is_symmetrizable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictBasis {
    /// CC with a return path: `C̄`.
    CcFeedback,
    /// CC without a return path: `C̲`.
    CcNoFeedback,
    /// Non-symmetrizable AVC: `C_r`.
    AvcNonsym,
    /// Symmetrizable AVC whose endpoints share a common source: `C_r`.
    AvcCommonRandomness,
    /// Symmetrizable AVC that is the whole two-node network: 0.
    AvcSymmetrizableIsolated,
    Undetermined,
}

impl std::fmt::Display for VerdictBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictBasis::CcFeedback => "CC_FEEDBACK",
            VerdictBasis::CcNoFeedback => "CC_NO_FEEDBACK",
            VerdictBasis::AvcNonsym => "AVC_NONSYM",
            VerdictBasis::AvcCommonRandomness => "AVC_COMMON_RANDOMNESS",
            VerdictBasis::AvcSymmetrizableIsolated => "AVC_SYMMETRIZABLE_ISOLATED",
            VerdictBasis::Undetermined => "UNDETERMINED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub edge: String,
    pub from: usize,
    pub to: usize,
    /// Pair set consulted, and whether it excluded the designated edge.
    pub pair_set: PairSet,
    pub pair_set_excludes_edge: bool,
    pub compound_lower: Option<CapacityResult>,
    pub compound_upper: Option<CapacityResult>,
    pub random_coding: Option<CapacityResult>,
    pub symmetrizable: Option<bool>,
    /// Node reaching both endpoints, for the common-randomness basis.
    pub common_source: Option<usize>,
    /// Upper bound on any equivalent rate when undetermined.
    pub upper_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub model: StateModelTag,
    pub rate_bits: Option<f64>,
    pub basis: VerdictBasis,
    pub evidence: Evidence,
}

impl EquivalenceVerdict {
    pub fn is_determined(&self) -> bool {
        self.basis != VerdictBasis::Undetermined
    }

    /// Whether the capacity solves behind the verdict met their tolerance.
    pub fn converged(&self) -> bool {
        let ev = &self.evidence;
        [&ev.compound_lower, &ev.compound_upper, &ev.random_coding].iter().all(|r| r.as_ref().map_or(true, |r| r.converged))
    }
}

fn designated_checked(net: &NetworkSpec, model: StateModelTag) -> Result<&Edge> {
    let edge = net.designated_edge()?;
    if edge.model != model {
        return Err(Error::ModelMismatch(format!("designated edge `{}` is `{}`, expected `{model}`", edge.label, edge.model)));
    }
    if let Some((_, other)) = net.stateful_edges().find(|(_, e)| e.label != edge.label) {
        return Err(Error::ModelMismatch(format!(
            "edge `{}` also carries state; only the designated edge may",
            other.label
        )));
    }
    Ok(edge)
}

/// Equivalent rate of a designated CC edge.
pub fn cc_equivalent_rate(net: &NetworkSpec, cfg: &SolverConfig) -> Result<EquivalenceVerdict> {
    let edge = designated_checked(net, StateModelTag::Cc)?;
    let rest = net.without_edge(&edge.label)?;
    let pairs = positive_rate_set_cc(&rest)?;
    let lower = compound_capacity_lower(&edge.channel, cfg)?;
    let upper = compound_capacity_upper(&edge.channel, cfg)?;
    let feedback = pairs.contains(edge.to, edge.from);
    let (basis, rate) =
        if feedback { (VerdictBasis::CcFeedback, upper.value) } else { (VerdictBasis::CcNoFeedback, lower.value) };
    Ok(EquivalenceVerdict {
        model: StateModelTag::Cc,
        rate_bits: Some(rate),
        basis,
        evidence: Evidence {
            edge: edge.label.clone(),
            from: edge.from,
            to: edge.to,
            pair_set: pairs,
            pair_set_excludes_edge: true,
            compound_lower: Some(lower),
            compound_upper: Some(upper),
            random_coding: None,
            symmetrizable: None,
            common_source: None,
            upper_bound: None,
        },
    })
}

/// Equivalent rate of a designated AVC edge.
pub fn avc_equivalent_rate(net: &NetworkSpec, cfg: &SolverConfig) -> Result<EquivalenceVerdict> {
    let edge = designated_checked(net, StateModelTag::Avc)?;
    let cr = random_coding_capacity(&edge.channel, cfg)?;
    let symmetrizable = is_symmetrizable(&edge.channel)?.feasible;
    let pairs = positive_rate_set_avc(net)?;
    let common = (1..=net.nodes()).find(|&u| pairs.contains(u, edge.from) && pairs.contains(u, edge.to));
    let isolated = net.nodes() == 2 && net.edges().len() == 1;
    let (basis, rate, bound) = if !symmetrizable {
        (VerdictBasis::AvcNonsym, Some(cr.value), None)
    } else if common.is_some() {
        (VerdictBasis::AvcCommonRandomness, Some(cr.value), None)
    } else if isolated {
        (VerdictBasis::AvcSymmetrizableIsolated, Some(0.0), None)
    } else {
        (VerdictBasis::Undetermined, None, Some(cr.upper_bound()))
    };
    Ok(EquivalenceVerdict {
        model: StateModelTag::Avc,
        rate_bits: rate,
        basis,
        evidence: Evidence {
            edge: edge.label.clone(),
            from: edge.from,
            to: edge.to,
            pair_set: pairs,
            pair_set_excludes_edge: false,
            compound_lower: None,
            compound_upper: None,
            random_coding: Some(cr),
            symmetrizable: Some(symmetrizable),
            common_source: if basis == VerdictBasis::AvcCommonRandomness { common } else { None },
            upper_bound: bound,
        },
    })
}

/// Dispatches on the designated edge's model.
pub fn equivalent_rate(net: &NetworkSpec, cfg: &SolverConfig) -> Result<EquivalenceVerdict> {
    match net.designated_edge()?.model {
        StateModelTag::Cc => cc_equivalent_rate(net, cfg),
        StateModelTag::Avc => avc_equivalent_rate(net, cfg),
        StateModelTag::None => Err(Error::ModelMismatch("designated edge carries no state model".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeRemovalReport {
    pub removed_edge: String,
    pub delta: f64,
    pub with_edge: EquivalenceVerdict,
    pub without_edge: EquivalenceVerdict,
}

impl EdgeRemovalReport {
    /// `rate_with − rate_without`; errors when either side is undetermined.
    pub fn gap(&self) -> Result<f64> {
        let (with, without) = self.rates()?;
        Ok(with - without)
    }

    pub fn rates(&self) -> Result<(f64, f64)> {
        let with = self.with_edge.rate_bits.ok_or(Error::Undetermined { side: "with" })?;
        let without = self.without_edge.rate_bits.ok_or(Error::Undetermined { side: "without" })?;
        Ok((with, without))
    }
}

/// Both verdicts, with and without the bit-pipe `removable`.
pub fn edge_removal(net: &NetworkSpec, removable: &str, delta: f64, cfg: &SolverConfig) -> Result<EdgeRemovalReport> {
    let edge = net.edge(removable)?;
    match edge.bitpipe_rate {
        Some(rate) if (rate - delta).abs() <= 1e-12 => {}
        Some(rate) => {
            return Err(Error::InvalidParameter(format!("edge `{removable}` has rate {rate}, not δ = {delta}")))
        }
        None => return Err(Error::InvalidParameter(format!("edge `{removable}` is not a bit-pipe"))),
    }
    if net.designated_label() == Some(removable) {
        return Err(Error::InvalidParameter("the removable edge cannot be the designated edge".into()));
    }
    let with_edge = equivalent_rate(net, cfg)?;
    let without_edge = equivalent_rate(&net.without_edge(removable)?, cfg)?;
    Ok(EdgeRemovalReport { removed_edge: removable.into(), delta, with_edge, without_edge })
}

/// `(rate_with, rate_without)`.
pub fn edge_removal_gap(net: &NetworkSpec, removable: &str, delta: f64, cfg: &SolverConfig) -> Result<(f64, f64)> {
    edge_removal(net, removable, delta, cfg)?.rates()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::catalog::*;

    fn cc_net(extra: Vec<Edge>) -> NetworkSpec {
        let mut edges = vec![Edge::channel(1, 2, "cc", StateModelTag::Cc, opposite_z(1, 0.5).unwrap())];
        edges.extend(extra);
        NetworkSpec::new(2, edges, Some("cc".into())).unwrap()
    }

    #[test]
    fn cc_branches() {
        let cfg = SolverConfig::default();
        let v = cc_equivalent_rate(&cc_net(vec![]), &cfg).unwrap();
        assert_eq!(v.basis, VerdictBasis::CcNoFeedback);
        let v = cc_equivalent_rate(&cc_net(vec![Edge::bitpipe(2, 1, "fb", 0.01).unwrap()]), &cfg).unwrap();
        assert_eq!(v.basis, VerdictBasis::CcFeedback);
        assert!((v.rate_bits.unwrap() - 1.25f64.log2()).abs() < 1e-5);
    }

    #[test]
    fn avc_branches() {
        let cfg = SolverConfig::default();
        let lone = NetworkSpec::new(2, vec![Edge::channel(1, 2, "a", StateModelTag::Avc, adder_avc())], Some("a".into())).unwrap();
        let v = avc_equivalent_rate(&lone, &cfg).unwrap();
        assert_eq!((v.basis, v.rate_bits), (VerdictBasis::AvcSymmetrizableIsolated, Some(0.0)));

        let helped = lone.with_edge(Edge::bitpipe(1, 2, "p", 1.0).unwrap()).unwrap();
        let v = avc_equivalent_rate(&helped, &cfg).unwrap();
        assert_eq!(v.basis, VerdictBasis::AvcCommonRandomness);
        assert_eq!(v.evidence.common_source, Some(1));

        let nonsym = NetworkSpec::new(
            2,
            vec![Edge::channel(1, 2, "a", StateModelTag::Avc, compound_bsc(&[0.1, 0.2]).unwrap())],
            Some("a".into()),
        )
        .unwrap();
        assert_eq!(avc_equivalent_rate(&nonsym, &cfg).unwrap().basis, VerdictBasis::AvcNonsym);
    }

    #[test]
    fn removal_gap_and_undetermined_side() {
        let cfg = SolverConfig::default();
        let net = cc_net(vec![Edge::bitpipe(2, 1, "fb", 0.01).unwrap()]);
        let report = edge_removal(&net, "fb", 0.01, &cfg).unwrap();
        assert!(report.gap().unwrap() > 0.005);

        let fig = NetworkSpec::new(
            3,
            vec![
                Edge::channel(1, 2, "a", StateModelTag::Avc, adder_avc()),
                Edge::bitpipe(3, 1, "d", 0.01).unwrap(),
                Edge::bitpipe(3, 2, "e", 1.0).unwrap(),
            ],
            Some("a".into()),
        )
        .unwrap();
        let report = edge_removal(&fig, "d", 0.01, &cfg).unwrap();
        assert_eq!(report.with_edge.basis, VerdictBasis::AvcCommonRandomness);
        assert_eq!(report.gap(), Err(Error::Undetermined { side: "without" }));
        assert!(edge_removal(&fig, "e", 0.01, &cfg).is_err());
    }
}
