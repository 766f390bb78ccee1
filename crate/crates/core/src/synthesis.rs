//! Two-cluster synthesis for networks of identical agents.
//!
//! The agents sit on a complete bipartite graph `K_{nA,nB}` with every edge
//! pointing from side A to side B, so each controller sees
//! `zeta = yB - yA`. Subtracting the steady-state equations of the two sides
//! pins the common controller value
//!
//! ```text
//! gamma(yB - yA) = (k^{-1}(yA) - k^{-1}(yB)) / (nA + nB)
//! ```
//!
//! and leaves the controller slope free.

use serde::Serialize;
use thiserror::Error;

use crate::network::{Assumption, Element, Graph, Network, NetworkError};
use crate::relations::{MonotoneRelation, RelationLiteral};
use crate::simulator::{detect_clusters, simulate, SimOptions};
use crate::steadystate::{solve, SolverOptions};
use crate::symmetry::exchangeability_partition;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("target values coincide; that is consensus, not clustering")]
    DegenerateTargets,
    #[error("agent relation has no unique input for output {0}")]
    RelationNotInvertible(f64),
    #[error("invalid cluster specification: {0}")]
    InvalidSpec(&'static str),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterSpec {
    pub sizes: (usize, usize),
    pub values: (f64, f64),
    pub slope: f64,
}

impl ClusterSpec {
    pub fn new(sizes: (usize, usize), values: (f64, f64)) -> Self {
        Self {
            sizes,
            values,
            slope: 1.0,
        }
    }

    pub fn with_slope(mut self, slope: f64) -> Self {
        self.slope = slope;
        self
    }

    /// Target output of every vertex, side A first.
    pub fn target(&self) -> Vec<f64> {
        let (na, nb) = self.sizes;
        let mut y = vec![self.values.0; na];
        y.extend(std::iter::repeat_n(self.values.1, nb));
        y
    }
}

/// Which side of the bipartite graph holds the edge heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    HeadsOnB,
    HeadsOnA,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub network: Network,
    /// `gamma(x) = slope * x + offset`.
    pub slope: f64,
    pub offset: f64,
    /// Common exogenous input.
    pub w: f64,
}

impl Synthesis {
    pub fn controller(&self) -> MonotoneRelation {
        MonotoneRelation::affine(self.slope, self.offset).expect("validated slope")
    }
}

/// Synthesis for agents described only by their steady-state relation.
pub fn synthesize_two_clusters(k: &MonotoneRelation, spec: &ClusterSpec) -> Result<Synthesis, SynthesisError> {
    synthesize_with_agent(&Element::from_relation(k), spec, Orientation::HeadsOnB)
}

pub fn synthesize_with_agent(
    agent: &Element,
    spec: &ClusterSpec,
    orientation: Orientation,
) -> Result<Synthesis, SynthesisError> {
    let (na, nb) = spec.sizes;
    let (ya, yb) = spec.values;
    if na == 0 || nb == 0 {
        return Err(SynthesisError::InvalidSpec("cluster sizes must be positive"));
    }
    if !(spec.slope > 0.0) || !spec.slope.is_finite() {
        return Err(SynthesisError::InvalidSpec(
            "controller slope must be positive and finite",
        ));
    }
    if !ya.is_finite() || !yb.is_finite() {
        return Err(SynthesisError::InvalidSpec("target values must be finite"));
    }
    if ya == yb {
        return Err(SynthesisError::DegenerateTargets);
    }
    let inverse = agent.relation.inverse();
    let input_at = |y: f64| {
        let v = inverse.evaluate(y);
        if v.is_point() && v.lo.is_finite() {
            Ok(v.lo)
        } else {
            Err(SynthesisError::RelationNotInvertible(y))
        }
    };
    let (ka, kb) = (input_at(ya)?, input_at(yb)?);
    let total = (na + nb) as f64;

    let (delta, value) = match orientation {
        Orientation::HeadsOnB => (yb - ya, (ka - kb) / total),
        Orientation::HeadsOnA => (ya - yb, (kb - ka) / total),
    };
    let offset = value - spec.slope * delta;
    let w = (na as f64 * ka + nb as f64 * kb) / total;

    let mut edges = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in na..na + nb {
            edges.push(match orientation {
                Orientation::HeadsOnB => (b, a),
                Orientation::HeadsOnA => (a, b),
            });
        }
    }
    let graph = Graph::new(na + nb, &edges)?;
    let controller = Element::from_relation_literal(RelationLiteral::affine(spec.slope, offset))?;
    let assumption = if agent.relation.is_strictly_monotone() {
        Assumption::A1
    } else {
        Assumption::A2
    };
    let network = Network::new(
        graph,
        vec![agent.clone(); na + nb],
        vec![controller; na * nb],
        vec![w; na + nb],
        assumption,
    )?;
    Ok(Synthesis {
        network,
        slope: spec.slope,
        offset,
        w,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisReport {
    pub partition: Check,
    pub steady_state: Check,
    pub simulation: Check,
}

impl SynthesisReport {
    pub fn passed(&self) -> bool {
        self.partition.passed && self.steady_state.passed && self.simulation.passed
    }
}

/// Tolerances and run lengths used by [`verify_synthesis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub solver: SolverOptions,
    pub sim: SimOptions,
    pub window: f64,
    /// Allowed deviation of solved values from the targets.
    pub solve_tol: f64,
    /// Allowed deviation of simulated cluster values from the targets.
    pub sim_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            sim: SimOptions::default(),
            window: 5.0,
            solve_tol: 1e-6,
            sim_tol: 1e-3,
        }
    }
}

/// Checks a synthesized (or modified) network against its specification:
/// predicted partition, solved steady state and simulated clusters.
pub fn verify_synthesis(net: &Network, spec: &ClusterSpec, opts: &VerifyOptions) -> SynthesisReport {
    let (na, nb) = spec.sizes;
    let target = spec.target();
    let expected: Vec<Vec<usize>> = vec![(0..na).collect(), (na..na + nb).collect()];

    let partition = match exchangeability_partition(net) {
        Ok(p) => Check {
            passed: p.blocks == expected,
            detail: format!("blocks {:?}", p.ids(net)),
        },
        Err(e) => Check {
            passed: false,
            detail: e.to_string(),
        },
    };

    let steady_state = match solve(net, &opts.solver) {
        Ok(ss) => {
            let dev = max_deviation(&ss.y, &target);
            Check {
                passed: dev <= opts.solve_tol && ss.residual <= opts.solver.tol,
                detail: format!("max deviation {dev:.3e}, residual {:.3e}", ss.residual),
            }
        }
        Err(e) => Check {
            passed: false,
            detail: e.to_string(),
        },
    };

    let simulation = match simulate(net, None, &opts.sim)
        .map_err(|e| e.to_string())
        .and_then(|tr| detect_clusters(&tr, opts.window, opts.sim_tol).map_err(|e| e.to_string()))
    {
        Ok(d) => {
            let dev = max_deviation(&d.vertex_values, &target);
            Check {
                passed: dev <= opts.sim_tol && d.partition.blocks == expected,
                detail: format!(
                    "clusters {:?} at {:?}, max deviation {dev:.3e}",
                    d.partition.ids(net),
                    d.partition.values.unwrap_or_default()
                ),
            }
        }
        Err(e) => Check {
            passed: false,
            detail: e,
        },
    };

    SynthesisReport {
        partition,
        steady_state,
        simulation,
    }
}

fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
