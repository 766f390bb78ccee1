//! JSON network description files.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Assumption, Element, Graph, Network, NetworkError};
use crate::relations::RelationLiteral;
use crate::simulator::ModelLiteral;

/// An agent or controller entry: either a steady-state relation literal or a
/// dynamic model reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementLiteral {
    Relation(RelationLiteral),
    Model(ModelLiteral),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: u32,
    pub agent: ElementLiteral,
    #[serde(default)]
    pub w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: u32,
    pub head: u32,
    pub tail: u32,
    pub controller: ElementLiteral,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    pub assumption: Assumption,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical text form: pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("network files always serialize");
        s.push('\n');
        s
    }

    pub fn to_network(&self) -> Result<Network, NetworkError> {
        let mut index = HashMap::new();
        let mut agents = Vec::with_capacity(self.vertices.len());
        let mut exogenous = Vec::with_capacity(self.vertices.len());
        let mut vertex_ids = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id == 0 {
                return Err(NetworkError::NonPositiveId { kind: "vertex" });
            }
            if index.insert(v.id, i).is_some() {
                return Err(NetworkError::DuplicateId {
                    kind: "vertex",
                    id: v.id,
                });
            }
            vertex_ids.push(v.id);
            agents.push(Element::from_literal(
                v.agent.clone(),
                v.class.clone(),
                &format!("agent {}", v.id),
            )?);
            exogenous.push(v.w);
        }

        let mut seen = HashMap::new();
        let mut pairs = Vec::with_capacity(self.edges.len());
        let mut controllers = Vec::with_capacity(self.edges.len());
        let mut edge_ids = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            if e.id == 0 {
                return Err(NetworkError::NonPositiveId { kind: "edge" });
            }
            if seen.insert(e.id, k).is_some() {
                return Err(NetworkError::DuplicateId { kind: "edge", id: e.id });
            }
            let lookup = |v: u32| {
                index
                    .get(&v)
                    .copied()
                    .ok_or(NetworkError::UnknownVertex { edge: e.id, vertex: v })
            };
            pairs.push((lookup(e.head)?, lookup(e.tail)?));
            edge_ids.push(e.id);
            controllers.push(Element::from_literal(
                e.controller.clone(),
                e.class.clone(),
                &format!("controller {}", e.id),
            )?);
        }

        let graph = Graph::new(self.vertices.len(), &pairs)?;
        Network::with_ids(
            graph,
            vertex_ids,
            edge_ids,
            agents,
            controllers,
            exogenous,
            self.assumption,
        )
    }

    pub fn from_network(net: &Network) -> Self {
        let vertices = net
            .agents()
            .iter()
            .enumerate()
            .map(|(i, a)| VertexEntry {
                id: net.vertex_ids()[i],
                agent: a.literal.clone(),
                w: net.exogenous()[i],
                class: a.class.clone(),
            })
            .collect();
        let edges = net
            .controllers()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = net.graph().edges()[k];
                EdgeEntry {
                    id: net.edge_ids()[k],
                    head: net.vertex_ids()[e.head],
                    tail: net.vertex_ids()[e.tail],
                    controller: c.literal.clone(),
                    class: c.class.clone(),
                }
            })
            .collect();
        Self {
            vertices,
            edges,
            assumption: net.assumption(),
        }
    }
}

impl Network {
    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        NetworkFile::from_json(text)?.to_network()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NetworkError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        NetworkFile::from_network(self).to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_NODE: &str = r#"{
  "vertices": [
    {"id": 1, "agent": {"named": "identity"}, "w": 1.0},
    {"id": 2, "agent": {"model": "lag"}}
  ],
  "edges": [
    {"id": 1, "head": 1, "tail": 2, "controller": {"affine": {"a": 1.0, "b": -1.2}}}
  ],
  "assumption": "A1"
}"#;

    #[test]
    fn parses_and_round_trips() {
        let net = Network::from_json(TWO_NODE).unwrap();
        assert_eq!(net.vertex_count(), 2);
        assert_eq!(net.exogenous(), &[1.0, 0.0]);
        assert!(net.agents()[1].model.is_some());
        let canonical = net.to_json();
        let again = Network::from_json(&canonical).unwrap();
        assert_eq!(again.to_json(), canonical);
        assert_eq!(again, net);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = TWO_NODE.replace("\"w\": 1.0", "\"w\": 1.0, \"colour\": 3");
        assert!(matches!(Network::from_json(&bad), Err(NetworkError::Json(_))));
        let bad = TWO_NODE.replace("\"assumption\": \"A1\"", "\"assumption\": \"A1\", \"x\": 1");
        assert!(Network::from_json(&bad).is_err());
    }

    #[test]
    fn rejects_bad_ids() {
        let bad = TWO_NODE.replace("\"id\": 2", "\"id\": 1");
        assert!(matches!(
            Network::from_json(&bad),
            Err(NetworkError::DuplicateId { kind: "vertex", id: 1 })
        ));
        let bad = TWO_NODE.replace("\"tail\": 2", "\"tail\": 7");
        assert!(matches!(
            Network::from_json(&bad),
            Err(NetworkError::UnknownVertex { vertex: 7, .. })
        ));
        let bad = TWO_NODE.replace("\"id\": 2", "\"id\": 0");
        assert!(matches!(
            Network::from_json(&bad),
            Err(NetworkError::NonPositiveId { .. })
        ));
    }
}
