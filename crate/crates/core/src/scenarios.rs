//! Reference networks used by the bundled fixtures, the tests and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{Assumption, Element, Graph, Network};
use crate::relations::{NamedRelation, RelationLiteral};
use crate::simulator::ModelKind;
use crate::synthesis::{synthesize_with_agent, ClusterSpec, Orientation, Synthesis};

/// Seed of the bundled weakly homogeneous cycle.
pub const DEFAULT_SEED: u64 = 2019;

/// Upper end of the common exogenous input on the weakly homogeneous cycle.
/// The `tanh` agent has an equilibrium only for inputs in `(-1, 1)`.
pub const CYCLE_INPUT_MAX: f64 = 0.9;

fn named_identity() -> Element {
    Element::from_relation_literal(RelationLiteral::named(NamedRelation::Identity)).expect("identity literal")
}

fn model(kind: ModelKind) -> Element {
    Element::from_model(kind).expect("builtin model")
}

/// Complete bipartite graph with vertices `0..na` on side A and heads on side B.
fn bipartite(na: usize, nb: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..na {
        for b in na..na + nb {
            edges.push((b, a));
        }
    }
    Graph::new(na + nb, &edges).expect("simple graph")
}

/// `K_{2,3}` with first-order lags `1/(s+1)` at vertices 1, 3, 4, 5, the
/// washout `s/(2s+1)` at vertex 2 and identity controllers.
pub fn k23_washout() -> Network {
    k23_washout_with_input(0.0)
}

/// [`k23_washout`] driven by a unit exogenous input at every vertex.
pub fn k23_washout_driven() -> Network {
    k23_washout_with_input(1.0)
}

fn k23_washout_with_input(w: f64) -> Network {
    let agents = vec![
        model(ModelKind::Lag),
        model(ModelKind::Washout),
        model(ModelKind::Lag),
        model(ModelKind::Lag),
        model(ModelKind::Lag),
    ];
    // the washout has a horizontal steady-state relation, so only the
    // controllers are output-strictly passive
    Network::new(
        bipartite(2, 3),
        agents,
        vec![named_identity(); 6],
        vec![w; 5],
        Assumption::A2,
    )
    .expect("valid network")
}

/// Draws the common exogenous input of the weakly homogeneous cycle.
pub fn cycle_input(seed: u64) -> f64 {
    ChaCha8Rng::seed_from_u64(seed).random_range(0.0..CYCLE_INPUT_MAX)
}

/// Five-cycle with five different agents sharing the identity steady-state
/// relation, static identity controllers and a seeded common input.
pub fn weakly_homogeneous_cycle(seed: u64) -> Network {
    weakly_homogeneous_cycle_with_input(cycle_input(seed))
}

pub fn weakly_homogeneous_cycle_with_input(c: f64) -> Network {
    let agents = vec![
        model(ModelKind::Lag),
        model(ModelKind::FastLag),
        model(ModelKind::TanhLag),
        model(ModelKind::SinhLag),
        model(ModelKind::FeedthroughLag),
    ];
    let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).expect("cycle");
    Network::new(
        g,
        agents,
        vec![model(ModelKind::StaticIdentity); 5],
        vec![c; 5],
        Assumption::A1,
    )
    .expect("valid network")
}

/// Two clusters of sizes 2 and 3 at 0 and 1 for agents `1/(s+1)`.
pub fn synthesis_example() -> Synthesis {
    synthesize_with_agent(
        &model(ModelKind::Lag),
        &ClusterSpec::new((2, 3), (0.0, 1.0)),
        Orientation::HeadsOnB,
    )
    .expect("fixed specification is admissible")
}

/// Two identity agents joined by an identity controller, `w = (1, 0)`.
pub fn two_node() -> Network {
    Network::new(
        Graph::new(2, &[(0, 1)]).expect("edge"),
        vec![named_identity(); 2],
        vec![named_identity()],
        vec![1.0, 0.0],
        Assumption::A1,
    )
    .expect("valid network")
}

/// Bundled fixtures as `(file name, network)`.
pub fn bundled() -> Vec<(&'static str, Network)> {
    vec![
        ("k23_washout.json", k23_washout()),
        ("k23_washout_driven.json", k23_washout_driven()),
        ("cycle.json", weakly_homogeneous_cycle(DEFAULT_SEED)),
        ("synthesis.json", synthesis_example().network),
        ("two_node.json", two_node()),
    ]
}
