//! Networks of independent point-to-point channels.
//!
//! Nodes are numbered `1..=m`. Each edge carries its own channel, optionally
//! with CC or AVC state; bit-pipes are noiseless edges tagged with a rate.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::channels::{bit_pipe_for_reachability, StateChannel, StateModelTag};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub model: StateModelTag,
    pub channel: StateChannel,
    /// Set for bit-pipes.
    pub bitpipe_rate: Option<f64>,
}

impl Edge {
    pub fn channel(from: usize, to: usize, label: impl Into<String>, model: StateModelTag, channel: StateChannel) -> Self {
        Self { from, to, label: label.into(), model, channel, bitpipe_rate: None }
    }

    pub fn bitpipe(from: usize, to: usize, label: impl Into<String>, rate: f64) -> Result<Self> {
        Ok(Self {
            from,
            to,
            label: label.into(),
            model: StateModelTag::None,
            channel: bit_pipe_for_reachability(rate)?,
            bitpipe_rate: Some(rate),
        })
    }

    pub fn is_stateful(&self) -> bool {
        self.channel.states() > 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    nodes: usize,
    edges: Vec<Edge>,
    designated: Option<String>,
}

/// Short edge description for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeSummary {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub model: StateModelTag,
    pub states: usize,
}

impl NetworkSpec {
    pub fn new(nodes: usize, edges: Vec<Edge>, designated: Option<String>) -> Result<Self> {
        let net = Self { nodes, edges, designated };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::InvalidNetwork("a network needs at least one node".into()));
        }
        let mut labels = BTreeSet::new();
        let (mut cc, mut avc) = (0, 0);
        for e in &self.edges {
            if !labels.insert(e.label.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate edge label `{}`", e.label)));
            }
            for node in [e.from, e.to] {
                if node == 0 || node > self.nodes {
                    return Err(Error::InvalidNetwork(format!(
                        "edge `{}` references node {node}, nodes are 1..={}",
                        e.label, self.nodes
                    )));
                }
            }
            if e.from == e.to {
                return Err(Error::InvalidNetwork(format!("edge `{}` is a self-loop", e.label)));
            }
            match e.model {
                StateModelTag::None if e.channel.states() != 1 => {
                    return Err(Error::InvalidNetwork(format!(
                        "edge `{}` has {} states but model `none`",
                        e.label,
                        e.channel.states()
                    )));
                }
                StateModelTag::Cc => cc += 1,
                StateModelTag::Avc => avc += 1,
                StateModelTag::None => {}
            }
        }
        if cc > 1 || avc > 1 {
            return Err(Error::InvalidNetwork("at most one CC edge and one AVC edge are allowed".into()));
        }
        if let Some(d) = &self.designated {
            if !labels.contains(d.as_str()) {
                return Err(Error::MissingEdge(d.clone()));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn designated_label(&self) -> Option<&str> {
        self.designated.as_deref()
    }

    pub fn edge(&self, label: &str) -> Result<&Edge> {
        self.edges.iter().find(|e| e.label == label).ok_or_else(|| Error::MissingEdge(label.into()))
    }

    pub fn designated_edge(&self) -> Result<&Edge> {
        let label = self.designated.as_deref().ok_or_else(|| Error::MissingEdge("<designated>".into()))?;
        self.edge(label)
    }

    /// Copy without `label`; the designation is dropped if it pointed there.
    pub fn without_edge(&self, label: &str) -> Result<NetworkSpec> {
        self.edge(label)?;
        let edges = self.edges.iter().filter(|e| e.label != label).cloned().collect();
        let designated = self.designated.clone().filter(|d| d != label);
        NetworkSpec::new(self.nodes, edges, designated)
    }

    pub fn with_edge(&self, edge: Edge) -> Result<NetworkSpec> {
        let mut edges = self.edges.clone();
        edges.push(edge);
        NetworkSpec::new(self.nodes, edges, self.designated.clone())
    }

    pub fn with_designated(&self, label: Option<String>) -> Result<NetworkSpec> {
        NetworkSpec::new(self.nodes, self.edges.clone(), label)
    }

    /// Edges whose channel has more than one state.
    pub fn stateful_edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_stateful())
    }

    pub fn summary(&self) -> Vec<EdgeSummary> {
        self.edges
            .iter()
            .map(|e| EdgeSummary {
                from: e.from,
                to: e.to,
                label: e.label.clone(),
                model: e.model,
                states: e.channel.states(),
            })
            .collect()
    }
}
