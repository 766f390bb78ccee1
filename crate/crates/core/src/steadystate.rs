//! Network steady states as minimizers of the optimal potential problem
//!
//! ```text
//! minimize  K*(y) - w^T y + Gamma(E^T y)
//! ```
//!
//! where `K*` is the sum of the conjugate agent potentials and `Gamma` the
//! sum of the controller potentials. The first-order condition is the
//! steady-state equation `w = k^{-1}(y) + E gamma(E^T y)`.
//!
//! The minimizer is found by primal-dual splitting: the dual variable lives
//! on the edges and converges to the controller outputs `mu`, and every
//! proximal step is a scalar resolvent of a piecewise-linear relation.

use serde::Serialize;
use thiserror::Error;

use crate::network::Network;
use crate::relations::{integrate, Interval, MonotoneRelation, PwqFunction, RelationError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver did not reach tolerance within {max_iter} iterations (best residual {:.3e})", best.residual)]
    NotConverged { max_iter: usize, best: Box<SteadyState> },
    #[error("network has no steady state: {0}")]
    Infeasible(String),
    #[error("flow recovery failed: duality gap {0:.3e}")]
    DualityGap(f64),
    #[error("invalid solver option: {0}")]
    InvalidOption(&'static str),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    pub y: Vec<f64>,
    pub zeta: Vec<f64>,
    pub mu: Vec<f64>,
    pub u: Vec<f64>,
    pub objective: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Conjugate agent potentials `K_i*` and controller potentials `Gamma_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub agents: Vec<PwqFunction>,
    pub controllers: Vec<PwqFunction>,
}

pub fn assemble(net: &Network) -> Potentials {
    Potentials {
        agents: net
            .agents()
            .iter()
            .map(|a| integrate(&a.relation).conjugate())
            .collect(),
        controllers: net.controllers().iter().map(|c| integrate(&c.relation)).collect(),
    }
}

impl Potentials {
    /// `K*(y) + Gamma(E^T y)`, without the exogenous term.
    pub fn potential(&self, net: &Network, y: &[f64]) -> f64 {
        let zeta = net.graph().relative_outputs(y);
        let k: f64 = self.agents.iter().zip(y).map(|(f, &v)| f.eval(v)).sum();
        let g: f64 = self.controllers.iter().zip(&zeta).map(|(f, &z)| f.eval(z)).sum();
        k + g
    }

    /// `K*(y) - w^T y + Gamma(E^T y)`.
    pub fn objective(&self, net: &Network, y: &[f64]) -> f64 {
        let wy: f64 = net.exogenous().iter().zip(y).map(|(w, v)| w * v).sum();
        self.potential(net, y) - wy
    }
}

pub fn objective(net: &Network, y: &[f64]) -> f64 {
    assemble(net).objective(net, y)
}

/// Steady-state residual of `y` with the controller outputs chosen as the
/// points of `gamma_e(zeta_e)` nearest zero.
pub fn residual(net: &Network, y: &[f64]) -> f64 {
    let zeta = net.graph().relative_outputs(y);
    let mu: Vec<f64> = net
        .controllers()
        .iter()
        .zip(&zeta)
        .map(|(c, &z)| {
            let val = c.relation.evaluate(z);
            if val.is_empty() {
                f64::NAN
            } else {
                val.clamp(0.0)
            }
        })
        .collect();
    if mu.iter().any(|m| m.is_nan()) {
        return f64::INFINITY;
    }
    residual_at(net, y, &mu)
}

/// `max_i dist(w_i - (E mu)_i, k_i^{-1}(y_i))` for a given controller
/// output selection `mu`.
pub fn residual_at(net: &Network, y: &[f64], mu: &[f64]) -> f64 {
    let div = net.graph().divergence(mu);
    net.agents()
        .iter()
        .enumerate()
        .map(|(i, a)| inverse_value(&a.relation, y[i]).distance(net.exogenous()[i] - div[i]))
        .fold(0.0, f64::max)
}

fn inverse_value(k: &MonotoneRelation, y: f64) -> Interval {
    k.inverse().evaluate(y)
}

/// Values of `r` on `[x - eps, x + eps]` with `eps` a few ulps, so that a
/// relative output rounded off a vertex still sees the vertical piece there.
fn value_near(r: &MonotoneRelation, x: f64) -> Interval {
    let eps = 1e-12 * (1.0 + x.abs());
    let d = r.domain();
    let (a, b) = ((x - eps).max(d.lo), (x + eps).min(d.hi));
    if a > b {
        return Interval::EMPTY;
    }
    // by monotonicity the values in between lie in this hull
    r.evaluate(a).hull(r.evaluate(b))
}

/// Per-condition violations of the primal-dual optimality system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityReport {
    /// `max_i dist((u_i + w_i, y_i), graph k_i)`.
    pub agent: f64,
    /// `max_e dist((zeta_e, mu_e), graph gamma_e)`.
    pub controller: f64,
    /// `max |u + E mu|` and `max |zeta - E^T y|`.
    pub coupling: f64,
}

impl OptimalityReport {
    pub fn max(&self) -> f64 {
        self.agent.max(self.controller).max(self.coupling)
    }
}

pub fn optimality(net: &Network, ss: &SteadyState) -> OptimalityReport {
    let w = net.exogenous();
    let agent = net
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| a.relation.distance_to(ss.u[i] + w[i], ss.y[i]))
        .fold(0.0, f64::max);
    let controller = net
        .controllers()
        .iter()
        .enumerate()
        .map(|(e, c)| c.relation.distance_to(ss.zeta[e], ss.mu[e]))
        .fold(0.0, f64::max);
    let div = net.graph().divergence(&ss.mu);
    let zeta = net.graph().relative_outputs(&ss.y);
    let coupling =
        ss.u.iter()
            .zip(&div)
            .map(|(u, d)| (u + d).abs())
            .chain(ss.zeta.iter().zip(&zeta).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
    OptimalityReport {
        agent,
        controller,
        coupling,
    }
}

/// Returns `(u, mu)` after checking `y in k(u + w)` and `mu in gamma(zeta)`.
pub fn recover_flow(net: &Network, ss: &SteadyState, tol: f64) -> Result<(Vec<f64>, Vec<f64>), SolveError> {
    let gap = optimality(net, ss).max();
    if !(gap <= tol) {
        return Err(SolveError::DualityGap(gap));
    }
    Ok((ss.u.clone(), ss.mu.clone()))
}

/// Minimizes the optimal potential problem, starting from `y = 0`, `mu = 0`.
pub fn solve(net: &Network, opts: &SolverOptions) -> Result<SteadyState, SolveError> {
    if !(opts.tol > 0.0) {
        return Err(SolveError::InvalidOption("tol must be positive"));
    }
    if opts.max_iter == 0 {
        return Err(SolveError::InvalidOption("max_iter must be positive"));
    }
    check_feasibility(net)?;
    check_domains(net)?;

    let g = net.graph();
    let n = g.vertex_count();
    let m = g.edge_count();
    let w = net.exogenous();
    let inverses: Vec<MonotoneRelation> = net.agents().iter().map(|a| a.relation.inverse()).collect();
    let gammas: Vec<&MonotoneRelation> = net.controllers().iter().map(|c| &c.relation).collect();

    let norm = g.incidence_norm_squared().sqrt();
    let step = if norm > 0.0 { 0.95 / norm } else { 1.0 };
    let (sigma, tau) = (step, step);

    let mut y = vec![0.0; n];
    let mut ybar = vec![0.0; n];
    let mut p = vec![0.0; m];
    let mut best: Option<SteadyState> = None;

    let scale = 1.0 + w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for it in 1..=opts.max_iter {
        let zbar = g.relative_outputs(&ybar);
        for e in 0..m {
            let q = p[e] + sigma * zbar[e];
            p[e] = q - sigma * gammas[e].resolvent(1.0 / sigma, q / sigma)?;
        }
        let div = g.divergence(&p);
        for i in 0..n {
            let y_new = inverses[i].resolvent(tau, y[i] - tau * div[i] + tau * w[i])?;
            ybar[i] = 2.0 * y_new - y[i];
            y[i] = y_new;
        }

        if it % 10 == 0 || it == opts.max_iter {
            let ss = extract(net, &gammas, &y, &p, it);
            let done = ss.residual <= opts.tol;
            if best.as_ref().is_none_or(|b| !(b.residual <= ss.residual)) {
                best = Some(ss);
            }
            if done {
                let mut ss = best.take().expect("just stored");
                ss.objective = objective(net, &ss.y);
                return Ok(ss);
            }
            let size = y.iter().chain(&p).fold(0.0f64, |a, b| a.max(b.abs()));
            if !size.is_finite() || size > 1e12 * scale {
                return Err(SolveError::Infeasible(
                    "iterates diverge; no finite steady state".to_string(),
                ));
            }
        }
    }
    let mut best = best.expect("at least one residual evaluation");
    best.objective = objective(net, &best.y);
    Err(SolveError::NotConverged {
        max_iter: opts.max_iter,
        best: Box::new(best),
    })
}

/// Reads off `mu = clamp(p, gamma(zeta))` and the residual. Iterates
/// approach optima on the boundary of a bounded domain from outside, where
/// `gamma(zeta)` or `k^{-1}(y)` is empty; those terms fall back to the
/// distance from the graph so that the residual still tends to zero.
fn extract(net: &Network, gammas: &[&MonotoneRelation], y: &[f64], p: &[f64], iterations: usize) -> SteadyState {
    let g = net.graph();
    let w = net.exogenous();
    let zeta = g.relative_outputs(y);
    let mut residual = 0.0f64;
    let mu: Vec<f64> = gammas
        .iter()
        .zip(&zeta)
        .zip(p)
        .map(|((gam, &z), &pe)| {
            let val = value_near(gam, z);
            if val.is_empty() {
                residual = residual.max(gam.distance_to(z, pe));
                pe
            } else {
                val.clamp(pe)
            }
        })
        .collect();
    let div = g.divergence(&mu);
    for (i, a) in net.agents().iter().enumerate() {
        let v = w[i] - div[i];
        let inv = value_near(&a.relation.inverse(), y[i]);
        let r = if inv.is_empty() {
            a.relation.distance_to(v, y[i])
        } else {
            inv.distance(v)
        };
        residual = residual.max(r);
    }
    let u: Vec<f64> = div.into_iter().map(|d| -d).collect();
    SteadyState {
        y: y.to_vec(),
        zeta,
        mu,
        u,
        objective: f64::NAN,
        residual,
        iterations,
    }
}

/// Summing the steady-state equation over the vertices shows that
/// `sum(w)` must lie in the Minkowski sum of the agent input domains.
fn check_feasibility(net: &Network) -> Result<(), SolveError> {
    let total: f64 = net.exogenous().iter().sum();
    let (lo, hi) = net.agents().iter().fold((0.0, 0.0), |(lo, hi), a| {
        let d = a.relation.domain();
        (lo + d.lo, hi + d.hi)
    });
    let slack = 1e-12 * (1.0 + total.abs());
    if total < lo - slack || total > hi + slack {
        return Err(SolveError::Infeasible(format!(
            "total exogenous input {total} lies outside [{lo}, {hi}], the sum of the agent input domains"
        )));
    }
    Ok(())
}

/// The potential is finite only if some `y` has every `y_i` in the range of
/// `k_i` and every `zeta_e` in the domain of `gamma_e`. These are difference
/// constraints, consistent iff the constraint graph (with an extra reference
/// vertex) has no negative cycle.
fn check_domains(net: &Network) -> Result<(), SolveError> {
    let g = net.graph();
    let n = g.vertex_count();
    let mut arcs: Vec<(usize, usize, f64)> = Vec::new();
    let mut bound = |from: usize, to: usize, c: f64| {
        if c.is_finite() {
            arcs.push((from, to, c));
        }
    };
    for (e, edge) in g.edges().iter().enumerate() {
        let d = net.controller_relation(e).domain();
        bound(edge.tail, edge.head, d.hi);
        bound(edge.head, edge.tail, -d.lo);
    }
    for i in 0..n {
        let r = net.agent_relation(i).range();
        bound(n, i, r.hi);
        bound(i, n, -r.lo);
    }
    let mut dist = vec![0.0f64; n + 1];
    for round in 0..=n + 1 {
        let mut changed = false;
        for &(a, b, c) in &arcs {
            let cand = dist[a] + c;
            if cand < dist[b] - 1e-9 * (1.0 + cand.abs()) {
                dist[b] = cand;
                changed = true;
            }
        }
        if !changed {
            return Ok(());
        }
        if round == n + 1 {
            break;
        }
    }
    Err(SolveError::Infeasible(
        "agent output ranges and controller domains admit no common output vector".to_string(),
    ))
}
