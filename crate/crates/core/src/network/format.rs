//! JSON interchange for networks.
//!
//! ```text
//! {"dim": 1, "params": {"w": "1"},
//!  "layers": [[{"gate": "relu", "a": ["w"], "b": "0", "parents": [[0, 0]]}]]}
//! ```
//!
//! `parents` may be omitted, meaning every node of the layer below.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{NetworkGraph, Node};
use crate::exact::Rat;
use crate::gates::GateSpec;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNet {
    dim: usize,
    #[serde(default)]
    params: BTreeMap<String, Rat>,
    layers: Vec<Vec<RawNode>>,
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    #[serde(flatten)]
    gate: GateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parents: Option<Vec<(usize, usize)>>,
}

/// Parse and validate a network document.
pub fn parse_net(text: &str) -> Result<NetworkGraph> {
    let raw: RawNet = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut layers = Vec::with_capacity(raw.layers.len());
    for (li, layer) in raw.layers.into_iter().enumerate() {
        let below = if li == 0 { raw.dim } else { layers.last().map(Vec::len).unwrap_or(0) };
        let nodes: Vec<Node> = layer
            .into_iter()
            .map(|n| Node { gate: n.gate, parents: n.parents.unwrap_or_else(|| (0..below).map(|i| (li, i)).collect()) })
            .collect();
        layers.push(nodes);
    }
    NetworkGraph::new(raw.dim, raw.params, layers)
}

/// Canonical text: parents always explicit, rationals as reduced strings.
pub fn serialize_net(net: &NetworkGraph) -> String {
    let raw = RawNet {
        dim: net.dim,
        params: net.params.clone(),
        layers: net
            .layers
            .iter()
            .map(|l| l.iter().map(|n| RawNode { gate: n.gate.clone(), parents: Some(n.parents.clone()) }).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("network serializes")
}

impl Serialize for NetworkGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: serde_json::Value = serde_json::from_str(&serialize_net(self)).map_err(serde::ser::Error::custom)?;
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NetworkGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<NetworkGraph, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        parse_net(&v.to_string()).map_err(serde::de::Error::custom)
    }
}
