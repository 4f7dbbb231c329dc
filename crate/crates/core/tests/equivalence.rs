mod common;

use advnet::capacity::*;
use advnet::channels::catalog::*;
use advnet::channels::StateModelTag;
use advnet::equivalence::*;
use advnet::error::Error;
use advnet::network::{Edge, NetworkSpec};

fn fig4(delta: f64) -> NetworkSpec {
    NetworkSpec::new(
        2,
        vec![
            Edge::channel(1, 2, "cc", StateModelTag::Cc, opposite_z(2, 1.0).unwrap()),
            Edge::bitpipe(2, 1, "feedback", delta).unwrap(),
        ],
        Some("cc".into()),
    )
    .unwrap()
}

#[test]
fn edge_removal_gap_exceeds_delta() {
    let cfg = SolverConfig::default();
    let net = fig4(0.01);
    let (with, without) = edge_removal_gap(&net, "feedback", 0.01, &cfg).unwrap();
    let ch = opposite_z(2, 1.0).unwrap();
    let hi = compound_capacity_upper(&ch, &cfg).unwrap().value;
    let lo = compound_capacity_lower(&ch, &cfg).unwrap().value;
    assert!((with - hi).abs() < 1e-9 && (without - lo).abs() < 1e-9);
    assert!(with - without >= 0.1 && with - without > 0.01);
    assert!(matches!(edge_removal(&net, "feedback", 0.02, &cfg), Err(Error::InvalidParameter(_))));
    assert!(matches!(edge_removal(&net, "cc", 0.01, &cfg), Err(Error::InvalidParameter(_))));
}

#[test]
fn avc_bases() {
    let cfg = SolverConfig::default();
    let two_relays = NetworkSpec::new(
        3,
        vec![
            Edge::channel(1, 2, "avc", StateModelTag::Avc, adder_avc()),
            Edge::bitpipe(1, 3, "r1", 1.0).unwrap(),
            Edge::bitpipe(2, 3, "r2", 2.0).unwrap(),
        ],
        Some("avc".into()),
    )
    .unwrap();
    let v = equivalent_rate(&two_relays, &cfg).unwrap();
    assert_eq!(v.basis, VerdictBasis::Undetermined);
    assert!(v.rate_bits.is_none());
    assert!((v.evidence.upper_bound.unwrap() - 0.5).abs() < 1e-4);

    let relay = two_relays.without_edge("r2").unwrap().with_edge(Edge::bitpipe(3, 2, "back", 1.0).unwrap()).unwrap();
    let v = equivalent_rate(&relay, &cfg).unwrap();
    assert_eq!(v.basis, VerdictBasis::AvcCommonRandomness);
    assert_eq!(v.evidence.common_source, Some(1));
    assert!((v.rate_bits.unwrap() - 0.5).abs() < 1e-4);

    let alone = NetworkSpec::new(2, vec![Edge::channel(1, 2, "avc", StateModelTag::Avc, adder_avc())], Some("avc".into())).unwrap();
    assert_eq!(equivalent_rate(&alone, &cfg).unwrap().rate_bits, Some(0.0));

    let nonsym = NetworkSpec::new(
        2,
        vec![Edge::channel(1, 2, "avc", StateModelTag::Avc, compound_bsc(&[0.1, 0.2]).unwrap())],
        Some("avc".into()),
    )
    .unwrap();
    let v = equivalent_rate(&nonsym, &cfg).unwrap();
    assert_eq!(v.basis, VerdictBasis::AvcNonsym);
    let cr = random_coding_capacity(&compound_bsc(&[0.1, 0.2]).unwrap(), &cfg).unwrap();
    assert!((v.rate_bits.unwrap() - cr.value).abs() < 1e-12);
}

#[test]
fn only_the_designated_edge_may_carry_state() {
    let net = fig4(0.5).with_edge(Edge::channel(1, 2, "j", StateModelTag::Avc, adder_avc())).unwrap();
    assert!(matches!(equivalent_rate(&net, &SolverConfig::default()), Err(Error::ModelMismatch(_))));
}
