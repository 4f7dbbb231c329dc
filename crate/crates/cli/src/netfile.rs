//! JSON network files.
//!
//! ```json
//! {
//!   "nodes": 3,
//!   "edges": [
//!     {"from": 1, "to": 2, "label": "j", "model": "avc", "matrix": [[[1, 0, 0], [0, 1, 0]], [[0, 1, 0], [0, 0, 1]]]},
//!     {"from": 1, "to": 3, "label": "r1", "bitpipe": 1.0}
//!   ],
//!   "designated": "j"
//! }
//! ```
//!
//! `matrix[s][x][y]` is `p(y | x, s)`. Bit-pipes carry a rate instead.

use std::path::Path;

use advnet::network::{Edge, NetworkSpec};
use advnet::{StateChannel, StateModelTag};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub nodes: usize,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: usize,
    pub to: usize,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<StateModelTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitpipe: Option<f64>,
}

impl EdgeEntry {
    fn to_edge(&self) -> Result<Edge, CliError> {
        let bad = |msg: String| CliError::Input(format!("edge `{}`: {msg}", self.label));
        match (&self.matrix, self.bitpipe) {
            (Some(m), None) => {
                let ch = StateChannel::from_nested(m).map_err(|e| bad(e.to_string()))?;
                let model = self.model.unwrap_or(StateModelTag::None);
                Ok(Edge::channel(self.from, self.to, self.label.clone(), model, ch))
            }
            (None, Some(rate)) => {
                if self.model.is_some_and(|m| m != StateModelTag::None) {
                    return Err(bad("a bit-pipe carries no state model".into()));
                }
                Edge::bitpipe(self.from, self.to, self.label.clone(), rate).map_err(|e| bad(e.to_string()))
            }
            (Some(_), Some(_)) => Err(bad("give either `matrix` or `bitpipe`, not both".into())),
            (None, None) => Err(bad("needs a `matrix` or a `bitpipe` rate".into())),
        }
    }

    fn from_edge(e: &Edge) -> Self {
        match e.bitpipe_rate {
            Some(rate) => Self { from: e.from, to: e.to, label: e.label.clone(), model: None, matrix: None, bitpipe: Some(rate) },
            None => Self {
                from: e.from,
                to: e.to,
                label: e.label.clone(),
                model: Some(e.model),
                matrix: Some(e.channel.to_nested()),
                bitpipe: None,
            },
        }
    }
}

impl NetworkFile {
    pub fn to_spec(&self) -> Result<NetworkSpec, CliError> {
        let edges = self.edges.iter().map(EdgeEntry::to_edge).collect::<Result<Vec<_>, _>>()?;
        NetworkSpec::new(self.nodes, edges, self.designated.clone()).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn from_spec(spec: &NetworkSpec) -> Self {
        Self {
            nodes: spec.nodes(),
            edges: spec.edges().iter().map(EdgeEntry::from_edge).collect(),
            designated: spec.designated_label().map(str::to_string),
        }
    }
}

pub fn parse(text: &str) -> Result<NetworkSpec, CliError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("network file: {e}")))?;
    file.to_spec()
}

pub fn load(path: &Path) -> Result<NetworkSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn emit(spec: &NetworkSpec) -> String {
    serde_json::to_string_pretty(&NetworkFile::from_spec(spec)).expect("network files serialize")
}
