//! Diffusively coupled networks: oriented graphs, incidence matrices, agent
//! and controller attachments, and the vertex permutations acting on them.
//!
//! The coupling is `zeta = E^T y` (controllers read output differences along
//! edges) and `u = -E mu` (agents receive the negated divergence of the
//! controller outputs), with `E` the signed incidence matrix.

mod file;
mod permutation;

pub use file::{EdgeEntry, ElementLiteral, NetworkFile, VertexEntry};
pub use permutation::{apply_output_permutation, permutation_triple, VertexPermutation};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relations::{MonotoneRelation, RelationError, RelationLiteral};
use crate::simulator::{DynamicModel, ModelError};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("malformed network file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edges {0} and {1} join the same pair of vertices")]
    DuplicateEdge(usize, usize),
    #[error("edge {edge} references vertex {vertex} outside the graph")]
    VertexOutOfRange { edge: usize, vertex: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: u32 },
    #[error("{kind} id must be a positive integer")]
    NonPositiveId { kind: &'static str },
    #[error("edge {edge} references unknown vertex id {vertex}")]
    UnknownVertex { edge: u32, vertex: u32 },
    #[error("assumption {assumption:?} requires strictly monotone {what} relations; {what} {id} is not")]
    AssumptionViolated {
        assumption: Assumption,
        what: &'static str,
        id: u32,
    },
    #[error("class labels must be given for all {0} or for none")]
    MixedClassLabels(&'static str),
    #[error("exogenous input of vertex {0} is not finite")]
    NonFiniteInput(u32),
    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("permutation is not an automorphism of the graph")]
    NotAnAutomorphism,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid relation for {0}: {1}")]
    Relation(String, RelationError),
    #[error("invalid model for {0}: {1}")]
    Model(String, ModelError),
}

/// Oriented edge `(head, tail)`; its incidence column has `+1` at the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub head: usize,
    pub tail: usize,
}

/// Simple undirected graph with a fixed orientation per edge. Vertices and
/// edges are indexed from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// `edges` are `(head, tail)` pairs.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, NetworkError> {
        let mut adjacency = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for (k, &(head, tail)) in edges.iter().enumerate() {
            for v in [head, tail] {
                if v >= n {
                    return Err(NetworkError::VertexOutOfRange { edge: k, vertex: v });
                }
            }
            if head == tail {
                return Err(NetworkError::SelfLoop(k));
            }
            if let Some(&(_, other)) = adjacency[head].iter().find(|&&(nb, _)| nb == tail) {
                return Err(NetworkError::DuplicateEdge(other, k));
            }
            adjacency[head].push((tail, k));
            adjacency[tail].push((head, k));
            out.push(Edge { head, tail });
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: out,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbour, edge index)` pairs sorted by neighbour.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let list = &self.adjacency[a];
        list.binary_search_by_key(&b, |&(nb, _)| nb).ok().map(|i| list[i].1)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(nb, _) in &self.adjacency[v] {
                if !seen[nb] {
                    seen[nb] = true;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
        count == self.n
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> Graph {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.tail, e.head)).collect();
        Graph::new(self.n, &pairs).expect("reversal keeps the graph simple")
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let mut m = DMatrix::zeros(self.n, self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            m[(e.head, k)] = 1.0;
            m[(e.tail, k)] = -1.0;
        }
        IncidenceMatrix(m)
    }

    /// `zeta = E^T y`.
    pub fn relative_outputs(&self, y: &[f64]) -> Vec<f64> {
        self.edges.iter().map(|e| y[e.head] - y[e.tail]).collect()
    }

    /// `E mu`.
    pub fn divergence(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (e, &m) in self.edges.iter().zip(mu) {
            out[e.head] += m;
            out[e.tail] -= m;
        }
        out
    }

    /// Largest eigenvalue of the Laplacian `E E^T` (= squared spectral norm
    /// of `E`) by power iteration.
    pub fn incidence_norm_squared(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        // deterministic start with no component along the all-ones kernel
        let mut v: Vec<f64> = (0..self.n)
            .map(|i| (i as f64 + 1.0).sin() + 0.5 * (i % 3) as f64)
            .collect();
        let mean = v.iter().sum::<f64>() / self.n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let mut lambda = 0.0;
        for _ in 0..500 {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let w = self.divergence(&self.relative_outputs(&v));
            let next = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            let done = (next - lambda).abs() <= 1e-12 * next.abs();
            lambda = next;
            v = w;
            if done {
                break;
            }
        }
        // Gershgorin bound guards against a slow power iteration
        let gersh = (0..self.n).map(|i| 2.0 * self.degree(i) as f64).fold(0.0, f64::max);
        (lambda * 1.01).min(gersh).max(lambda)
    }
}

/// Signed `|V| x |E|` incidence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix(pub DMatrix<f64>);

impl IncidenceMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        &self.0 * self.0.transpose()
    }
}

/// Which side of the network is output-strictly MEIP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assumption {
    /// Output-strictly MEIP agents, MEIP controllers.
    A1,
    /// MEIP agents, output-strictly MEIP controllers.
    A2,
}

/// An agent or controller: its steady-state relation, an optional dynamic
/// model, and an optional user-declared equivalence class.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub literal: ElementLiteral,
    pub relation: MonotoneRelation,
    pub model: Option<DynamicModel>,
    pub class: Option<String>,
}

impl Element {
    pub fn from_literal(literal: ElementLiteral, class: Option<String>, name: &str) -> Result<Self, NetworkError> {
        let (relation, model) = match &literal {
            ElementLiteral::Relation(r) => (
                r.to_relation()
                    .map_err(|e| NetworkError::Relation(name.to_string(), e))?,
                None,
            ),
            ElementLiteral::Model(m) => {
                let model = m.model.build().map_err(|e| NetworkError::Model(name.to_string(), e))?;
                (model.steady_state_relation(), Some(model))
            }
        };
        Ok(Self {
            literal,
            relation,
            model,
            class,
        })
    }

    /// Element described by its relation only.
    pub fn from_relation(r: &MonotoneRelation) -> Self {
        Self {
            literal: ElementLiteral::Relation(RelationLiteral::from_relation(r)),
            relation: r.clone(),
            model: None,
            class: None,
        }
    }

    /// Element with an explicit literal (for example an `affine` shorthand).
    pub fn from_relation_literal(lit: RelationLiteral) -> Result<Self, NetworkError> {
        Self::from_literal(ElementLiteral::Relation(lit), None, "element")
    }

    pub fn from_model(kind: crate::simulator::ModelKind) -> Result<Self, NetworkError> {
        Self::from_literal(
            ElementLiteral::Model(crate::simulator::ModelLiteral { model: kind }),
            None,
            "element",
        )
    }

    pub fn with_class(mut self, class: impl Into<String>) -> Self {
        self.class = Some(class.into());
        self
    }
}

/// The triplet (graph, agents, controllers) plus constant exogenous inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    graph: Graph,
    vertex_ids: Vec<u32>,
    edge_ids: Vec<u32>,
    agents: Vec<Element>,
    controllers: Vec<Element>,
    exogenous: Vec<f64>,
    assumption: Assumption,
}

impl Network {
    /// Builds a network with ids `1..=n` for vertices and `1..=m` for edges.
    pub fn new(
        graph: Graph,
        agents: Vec<Element>,
        controllers: Vec<Element>,
        exogenous: Vec<f64>,
        assumption: Assumption,
    ) -> Result<Self, NetworkError> {
        let vertex_ids = (1..=graph.vertex_count() as u32).collect();
        let edge_ids = (1..=graph.edge_count() as u32).collect();
        Self::with_ids(graph, vertex_ids, edge_ids, agents, controllers, exogenous, assumption)
    }

    pub fn with_ids(
        graph: Graph,
        vertex_ids: Vec<u32>,
        edge_ids: Vec<u32>,
        agents: Vec<Element>,
        controllers: Vec<Element>,
        exogenous: Vec<f64>,
        assumption: Assumption,
    ) -> Result<Self, NetworkError> {
        let n = graph.vertex_count();
        let m = graph.edge_count();
        if n == 0 {
            return Err(NetworkError::EmptyGraph);
        }
        for (what, expected, got) in [
            ("agents", n, agents.len()),
            ("exogenous inputs", n, exogenous.len()),
            ("vertex ids", n, vertex_ids.len()),
            ("controllers", m, controllers.len()),
            ("edge ids", m, edge_ids.len()),
        ] {
            if expected != got {
                return Err(NetworkError::LengthMismatch { what, expected, got });
            }
        }
        if !graph.is_connected() {
            return Err(NetworkError::Disconnected);
        }
        for (i, w) in exogenous.iter().enumerate() {
            if !w.is_finite() {
                return Err(NetworkError::NonFiniteInput(vertex_ids[i]));
            }
        }
        check_labels(&agents, "agents")?;
        check_labels(&controllers, "controllers")?;
        match assumption {
            Assumption::A1 => {
                if let Some(i) = agents.iter().position(|a| !a.relation.is_strictly_monotone()) {
                    return Err(NetworkError::AssumptionViolated {
                        assumption,
                        what: "agent",
                        id: vertex_ids[i],
                    });
                }
            }
            Assumption::A2 => {
                if let Some(e) = controllers.iter().position(|c| !c.relation.is_strictly_monotone()) {
                    return Err(NetworkError::AssumptionViolated {
                        assumption,
                        what: "controller",
                        id: edge_ids[e],
                    });
                }
            }
        }
        Ok(Self {
            graph,
            vertex_ids,
            edge_ids,
            agents,
            controllers,
            exogenous,
            assumption,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_ids(&self) -> &[u32] {
        &self.vertex_ids
    }

    pub fn edge_ids(&self) -> &[u32] {
        &self.edge_ids
    }

    pub fn agents(&self) -> &[Element] {
        &self.agents
    }

    pub fn controllers(&self) -> &[Element] {
        &self.controllers
    }

    pub fn agent_relation(&self, i: usize) -> &MonotoneRelation {
        &self.agents[i].relation
    }

    pub fn controller_relation(&self, e: usize) -> &MonotoneRelation {
        &self.controllers[e].relation
    }

    pub fn exogenous(&self) -> &[f64] {
        &self.exogenous
    }

    pub fn assumption(&self) -> Assumption {
        self.assumption
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Same network with a different exogenous input vector.
    pub fn with_exogenous(&self, w: Vec<f64>) -> Result<Self, NetworkError> {
        Self::with_ids(
            self.graph.clone(),
            self.vertex_ids.clone(),
            self.edge_ids.clone(),
            self.agents.clone(),
            self.controllers.clone(),
            w,
            self.assumption,
        )
    }

    /// Same network with every edge orientation flipped.
    pub fn with_reversed_edges(&self) -> Self {
        Self {
            graph: self.graph.reversed(),
            ..self.clone()
        }
    }

    /// Whether every controller relation is odd, so that edge orientation
    /// does not affect the steady state.
    pub fn controllers_odd(&self) -> bool {
        self.controllers.iter().all(|c| c.relation.is_odd())
    }
}

fn check_labels(elements: &[Element], what: &'static str) -> Result<(), NetworkError> {
    let labelled = elements.iter().filter(|e| e.class.is_some()).count();
    if labelled != 0 && labelled != elements.len() {
        return Err(NetworkError::MixedClassLabels(what));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_incidence() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let e = g.incidence();
        assert_eq!(e.matrix()[(0, 0)], 1.0);
        assert_eq!(e.matrix()[(1, 0)], -1.0);
    }

    #[test]
    fn empty_edge_set_incidence() {
        let g = Graph::new(3, &[]).unwrap();
        let e = g.incidence();
        assert_eq!(e.matrix().shape(), (3, 0));
    }

    #[test]
    fn path_incidence_matches_definition() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let e = g.incidence();
        let expect = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, -1.0, 1.0, 0.0, -1.0]);
        assert_eq!(e.matrix(), &expect);
        for k in 0..2 {
            assert_eq!(e.matrix().column(k).sum(), 0.0);
        }
    }

    #[test]
    fn laplacian_is_psd_with_constant_kernel() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let l = g.incidence().laplacian();
        assert_eq!(l, l.transpose());
        let ones = DMatrix::from_element(5, 1, 1.0);
        assert!((&l * ones).abs().max() < 1e-15);
        let eig = nalgebra::SymmetricEigen::new(l);
        assert!(eig.eigenvalues.iter().all(|&x| x > -1e-12));
        let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let est = g.incidence_norm_squared();
        assert!(est >= lmax - 1e-9 && est <= lmax * 1.02 + 1e-9);
    }

    #[test]
    fn matrix_free_coupling_matches_incidence() {
        let g = Graph::new(4, &[(0, 1), (2, 1), (3, 2)]).unwrap();
        let e = g.incidence();
        let y = [0.3, -1.0, 2.0, 0.5];
        let zeta = g.relative_outputs(&y);
        let expect = e.matrix().transpose() * nalgebra::DVector::from_row_slice(&y);
        for k in 0..3 {
            assert_eq!(zeta[k], expect[k]);
        }
        let mu = [1.0, -2.0, 0.25];
        let div = g.divergence(&mu);
        let expect = e.matrix() * nalgebra::DVector::from_row_slice(&mu);
        for i in 0..4 {
            assert_eq!(div[i], expect[i]);
        }
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(Graph::new(2, &[(0, 0)]), Err(NetworkError::SelfLoop(0))));
        assert!(matches!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(NetworkError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 2)]),
            Err(NetworkError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn network_rejects_disconnected_graphs_and_violated_assumptions() {
        let id = Element::from_relation(&MonotoneRelation::identity());
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        let err = Network::new(g, vec![id.clone(); 3], vec![id.clone()], vec![0.0; 3], Assumption::A1).unwrap_err();
        assert!(matches!(err, NetworkError::Disconnected));

        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let zero = Element::from_relation(&MonotoneRelation::zero());
        let err = Network::new(
            g.clone(),
            vec![id.clone(), zero],
            vec![id.clone()],
            vec![0.0; 2],
            Assumption::A1,
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::AssumptionViolated { id: 2, .. }));

        let err = Network::new(
            g,
            vec![id.clone().with_class("a"), id.clone()],
            vec![id],
            vec![0.0; 2],
            Assumption::A1,
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::MixedClassLabels("agents")));
    }
}
