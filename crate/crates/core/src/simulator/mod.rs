//! Closed-loop simulation of diffusively coupled networks.
//!
//! Agent `i` is driven by `u_i + w_i` and produces `y_i`; controller `e` reads
//! `zeta_e = (E^T y)_e` and produces `mu_e`; the loop closes through
//! `u = -E mu`. Integration is classical fixed-step RK4, with direct
//! feedthrough loops resolved inside every stage.

mod models;

pub use models::*;

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector, LU};
use serde::Serialize;
use thiserror::Error;

use crate::network::{Graph, Network};
use crate::symmetry::Partition;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("sampling interval must be at least one step")]
    InvalidSampling,
    #[error("initial state has length {got}, expected {expected}")]
    InitialState { expected: usize, got: usize },
    #[error("algebraic loop could not be resolved: {0}")]
    AlgebraicLoopDiverged(String),
    #[error("state became non-finite at t = {0}")]
    NonFiniteState(f64),
    #[error("cannot realize {0} dynamically: {1}")]
    Model(String, ModelError),
    #[error("window {window} is not shorter than the trace ({duration})")]
    WindowTooLong { window: f64, duration: f64 },
    #[error("outputs still drift by {drift:.3e} over the window (tolerance {tol:.1e})")]
    NotStationary { drift: f64, tol: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub duration: f64,
    pub dt: f64,
    /// Record every `sample_every`-th step (the first and last are always kept).
    pub sample_every: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            duration: 50.0,
            dt: 1e-3,
            sample_every: 10,
        }
    }
}

/// Instantaneous closed-loop signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Signals {
    pub y: Vec<f64>,
    pub zeta: Vec<f64>,
    pub u: Vec<f64>,
    pub mu: Vec<f64>,
}

enum LoopSolver {
    /// No agent depends instantaneously on its input.
    AgentsFirst,
    /// No controller depends instantaneously on its input.
    ControllersFirst,
    /// `(I + D E G E^T) y = y0 + D w - D E mu0`.
    Affine {
        lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
        agent_gain: Vec<f64>,
    },
    /// Damped fixed-point iteration with step `theta`.
    Damped { theta: f64 },
}

const LOOP_TOL: f64 = 1e-12;
const LOOP_MAX_ITER: usize = 10_000;

/// The stacked closed-loop system of a network.
pub struct ClosedLoop {
    graph: Graph,
    agents: Vec<DynamicModel>,
    controllers: Vec<DynamicModel>,
    w: Vec<f64>,
    agent_offset: Vec<usize>,
    controller_offset: Vec<usize>,
    dim: usize,
    solver: LoopSolver,
}

impl ClosedLoop {
    /// Uses each element's model, or a default realization of its relation.
    pub fn new(net: &Network) -> Result<Self, SimError> {
        let mut agents = Vec::with_capacity(net.vertex_count());
        for (i, a) in net.agents().iter().enumerate() {
            let model = match &a.model {
                Some(m) => m.clone(),
                None => DynamicModel::realize_agent(&a.relation)
                    .map_err(|e| SimError::Model(format!("agent {}", net.vertex_ids()[i]), e))?,
            };
            agents.push(model);
        }
        let mut controllers = Vec::with_capacity(net.edge_count());
        for (k, c) in net.controllers().iter().enumerate() {
            let model = match &c.model {
                Some(m) => m.clone(),
                None => DynamicModel::realize_controller(&c.relation)
                    .map_err(|e| SimError::Model(format!("controller {}", net.edge_ids()[k]), e))?,
            };
            controllers.push(model);
        }

        let mut dim = 0;
        let agent_offset = agents
            .iter()
            .map(|m| {
                let o = dim;
                dim += m.state_dim();
                o
            })
            .collect();
        let controller_offset = controllers
            .iter()
            .map(|m| {
                let o = dim;
                dim += m.state_dim();
                o
            })
            .collect();

        let graph = net.graph().clone();
        let solver = loop_solver(&graph, &agents, &controllers)?;
        Ok(Self {
            graph,
            agents,
            controllers,
            w: net.exogenous().to_vec(),
            agent_offset,
            controller_offset,
            dim,
            solver,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.dim
    }

    pub fn agents(&self) -> &[DynamicModel] {
        &self.agents
    }

    fn agent_state(&self, x: &[f64], i: usize) -> f64 {
        if self.agents[i].state_dim() == 0 {
            0.0
        } else {
            x[self.agent_offset[i]]
        }
    }

    fn controller_state(&self, x: &[f64], e: usize) -> f64 {
        if self.controllers[e].state_dim() == 0 {
            0.0
        } else {
            x[self.controller_offset[e]]
        }
    }

    fn agent_outputs(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        (0..self.agents.len())
            .map(|i| self.agents[i].output(self.agent_state(x, i), u[i] + self.w[i]))
            .collect()
    }

    fn controller_outputs(&self, x: &[f64], zeta: &[f64]) -> Vec<f64> {
        (0..self.controllers.len())
            .map(|e| self.controllers[e].output(self.controller_state(x, e), zeta[e]))
            .collect()
    }

    fn close(&self, x: &[f64], y: Vec<f64>) -> Signals {
        let zeta = self.graph.relative_outputs(&y);
        let mu = self.controller_outputs(x, &zeta);
        let u = self.graph.divergence(&mu).into_iter().map(|d| -d).collect();
        Signals { y, zeta, u, mu }
    }

    /// Solves the instantaneous coupling equations for the state `x`.
    pub fn resolve_feedthrough(&self, x: &[f64]) -> Result<Signals, SimError> {
        let n = self.agents.len();
        match &self.solver {
            LoopSolver::AgentsFirst => {
                let y = self.agent_outputs(x, &vec![0.0; n]);
                Ok(self.close(x, y))
            }
            LoopSolver::ControllersFirst => {
                let mu = self.controller_outputs(x, &vec![0.0; self.controllers.len()]);
                let u: Vec<f64> = self.graph.divergence(&mu).into_iter().map(|d| -d).collect();
                let y = self.agent_outputs(x, &u);
                let zeta = self.graph.relative_outputs(&y);
                Ok(Signals { y, zeta, u, mu })
            }
            LoopSolver::Affine { lu, agent_gain } => {
                let y0 = self.agent_outputs(x, &self.w.iter().map(|w| -w).collect::<Vec<_>>());
                let mu0 = self.controller_outputs(x, &vec![0.0; self.controllers.len()]);
                let div0 = self.graph.divergence(&mu0);
                let rhs = DVector::from_fn(n, |i, _| y0[i] + agent_gain[i] * (self.w[i] - div0[i]));
                let y = lu
                    .solve(&rhs)
                    .ok_or_else(|| SimError::AlgebraicLoopDiverged("singular loop matrix".into()))?;
                Ok(self.close(x, y.iter().copied().collect()))
            }
            LoopSolver::Damped { theta } => {
                let mut y = self.agent_outputs(x, &vec![0.0; n]);
                for _ in 0..LOOP_MAX_ITER {
                    let s = self.close(x, y.clone());
                    let next = self.agent_outputs(x, &s.u);
                    let mut change = 0.0f64;
                    for i in 0..n {
                        let step = next[i] - y[i];
                        change = change.max(step.abs() / (1.0 + y[i].abs()));
                        y[i] += theta * step;
                    }
                    if !change.is_finite() {
                        break;
                    }
                    if change <= LOOP_TOL {
                        return Ok(self.close(x, next));
                    }
                }
                Err(SimError::AlgebraicLoopDiverged(format!(
                    "damped iteration did not converge in {LOOP_MAX_ITER} steps"
                )))
            }
        }
    }

    /// Time derivative of the stacked state, and the signals it was computed from.
    pub fn derivative(&self, x: &[f64]) -> Result<(Vec<f64>, Signals), SimError> {
        let s = self.resolve_feedthrough(x)?;
        let mut dx = vec![0.0; self.dim];
        for (i, m) in self.agents.iter().enumerate() {
            if m.state_dim() == 1 {
                dx[self.agent_offset[i]] = m.drift(x[self.agent_offset[i]], s.u[i] + self.w[i]);
            }
        }
        for (e, m) in self.controllers.iter().enumerate() {
            if m.state_dim() == 1 {
                dx[self.controller_offset[e]] = m.drift(x[self.controller_offset[e]], s.zeta[e]);
            }
        }
        Ok((dx, s))
    }
}

fn loop_solver(graph: &Graph, agents: &[DynamicModel], controllers: &[DynamicModel]) -> Result<LoopSolver, SimError> {
    let agent_ft: Vec<Feedthrough> = agents.iter().map(DynamicModel::feedthrough).collect();
    let controller_ft: Vec<Feedthrough> = controllers.iter().map(DynamicModel::feedthrough).collect();
    if agent_ft.iter().all(|f| *f == Feedthrough::None) {
        return Ok(LoopSolver::AgentsFirst);
    }
    if controller_ft.iter().all(|f| *f == Feedthrough::None) {
        return Ok(LoopSolver::ControllersFirst);
    }
    let gain = |f: &Feedthrough| match *f {
        Feedthrough::None => Some(0.0),
        Feedthrough::Affine { gain } => Some(gain),
        Feedthrough::Nonlinear { .. } => None,
    };
    let agent_gain: Option<Vec<f64>> = agent_ft.iter().map(gain).collect();
    let controller_gain: Option<Vec<f64>> = controller_ft.iter().map(gain).collect();
    if let (Some(d), Some(g)) = (agent_gain, controller_gain) {
        let e = graph.incidence();
        let e = e.matrix();
        let n = graph.vertex_count();
        let dm = DMatrix::from_diagonal(&DVector::from_vec(d.clone()));
        let gm = DMatrix::from_diagonal(&DVector::from_vec(g));
        let a = DMatrix::identity(n, n) + dm * e * gm * e.transpose();
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(SimError::AlgebraicLoopDiverged(
                "loop matrix I + D E G E^T is singular".into(),
            ));
        }
        return Ok(LoopSolver::Affine { lu, agent_gain: d });
    }
    let max_gain = |f: &Feedthrough| match *f {
        Feedthrough::None => 0.0,
        Feedthrough::Affine { gain } => gain.abs(),
        Feedthrough::Nonlinear { max_gain } => max_gain,
    };
    let d = agent_ft.iter().map(max_gain).fold(0.0, f64::max);
    let g = controller_ft.iter().map(max_gain).fold(0.0, f64::max);
    let lipschitz = d * g * graph.incidence_norm_squared();
    Ok(LoopSolver::Damped {
        theta: 1.0 / (1.0 + lipschitz),
    })
}

/// Sampled closed-loop trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub vertex_ids: Vec<u32>,
    pub edge_ids: Vec<u32>,
    pub times: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub zeta: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    pub final_state: Vec<f64>,
}

impl Trace {
    fn push(&mut self, t: f64, s: Signals) {
        self.times.push(t);
        self.y.push(s.y);
        self.zeta.push(s.zeta);
        self.u.push(s.u);
        self.mu.push(s.mu);
    }

    pub fn final_outputs(&self) -> &[f64] {
        self.y.last().expect("trace has at least one sample")
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("trace has at least one sample")
    }

    /// CSV with columns `t, y_*, zeta_*, u_*, mu_*`, suffixed by element id.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SimError> {
        let mut wr = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(self.vertex_ids.iter().map(|i| format!("y_{i}")));
        header.extend(self.edge_ids.iter().map(|e| format!("zeta_{e}")));
        header.extend(self.vertex_ids.iter().map(|i| format!("u_{i}")));
        header.extend(self.edge_ids.iter().map(|e| format!("mu_{e}")));
        wr.write_record(&header)?;
        for k in 0..self.times.len() {
            let row = std::iter::once(self.times[k])
                .chain(self.y[k].iter().copied())
                .chain(self.zeta[k].iter().copied())
                .chain(self.u[k].iter().copied())
                .chain(self.mu[k].iter().copied())
                .map(|v| v.to_string());
            wr.write_record(row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), SimError> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Integrates the closed loop of `net` from `x0` (zero when `None`).
pub fn simulate(net: &Network, x0: Option<&[f64]>, opts: &SimOptions) -> Result<Trace, SimError> {
    let sys = ClosedLoop::new(net)?;
    simulate_system(&sys, net, x0, opts)
}

pub fn simulate_system(
    sys: &ClosedLoop,
    net: &Network,
    x0: Option<&[f64]>,
    opts: &SimOptions,
) -> Result<Trace, SimError> {
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(SimError::InvalidStep(opts.dt));
    }
    if !(opts.duration > 0.0) || !opts.duration.is_finite() {
        return Err(SimError::InvalidDuration(opts.duration));
    }
    if opts.sample_every == 0 {
        return Err(SimError::InvalidSampling);
    }
    let dim = sys.state_dim();
    let mut x = match x0 {
        Some(x0) if x0.len() != dim => {
            return Err(SimError::InitialState {
                expected: dim,
                got: x0.len(),
            })
        }
        Some(x0) => x0.to_vec(),
        None => vec![0.0; dim],
    };
    let steps = (opts.duration / opts.dt).round().max(1.0) as usize;
    let dt = opts.duration / steps as f64;

    let mut trace = Trace {
        vertex_ids: net.vertex_ids().to_vec(),
        edge_ids: net.edge_ids().to_vec(),
        times: Vec::new(),
        y: Vec::new(),
        zeta: Vec::new(),
        u: Vec::new(),
        mu: Vec::new(),
        final_state: Vec::new(),
    };
    let axpy = |x: &[f64], a: f64, k: &[f64]| -> Vec<f64> { x.iter().zip(k).map(|(x, k)| x + a * k).collect() };

    let (mut k1, mut signals) = sys.derivative(&x)?;
    trace.push(0.0, signals);
    for step in 1..=steps {
        let (k2, _) = sys.derivative(&axpy(&x, 0.5 * dt, &k1))?;
        let (k3, _) = sys.derivative(&axpy(&x, 0.5 * dt, &k2))?;
        let (k4, _) = sys.derivative(&axpy(&x, dt, &k3))?;
        for j in 0..dim {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t = step as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFiniteState(t));
        }
        (k1, signals) = sys.derivative(&x)?;
        if step % opts.sample_every == 0 || step == steps {
            trace.push(t, signals);
        }
    }
    trace.final_state = x;
    Ok(trace)
}

/// Empirical clusters of a trace: per-vertex averages over the final window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub partition: Partition,
    /// Window average of every vertex output.
    pub vertex_values: Vec<f64>,
    /// Largest spread of a vertex output over the window.
    pub drift: f64,
}

/// Groups vertices whose window-averaged outputs differ by at most `tol`
/// (single linkage on the sorted averages).
pub fn detect_clusters(trace: &Trace, window: f64, tol: f64) -> Result<Detection, SimError> {
    let end = trace.duration();
    if !(window >= 0.0) || window >= end {
        return Err(SimError::WindowTooLong { window, duration: end });
    }
    let start = end - window;
    let first = trace
        .times
        .iter()
        .position(|&t| t >= start - 1e-12 * end)
        .unwrap_or(trace.times.len() - 1);
    let samples = &trace.y[first..];
    let n = trace.vertex_ids.len();
    let mut means = vec![0.0; n];
    let mut drift = 0.0f64;
    for i in 0..n {
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for s in samples {
            lo = lo.min(s[i]);
            hi = hi.max(s[i]);
            sum += s[i];
        }
        means[i] = sum / samples.len() as f64;
        drift = drift.max(hi - lo);
    }
    if !(drift <= tol) {
        return Err(SimError::NotStationary { drift, tol });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in order.iter().enumerate() {
        if k == 0 || means[v] - means[order[k - 1]] > tol {
            blocks.push(Vec::new());
        }
        blocks.last_mut().expect("pushed").push(v);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_by_key(|b| b[0]);
    let values = blocks
        .iter()
        .map(|b| b.iter().map(|&i| means[i]).sum::<f64>() / b.len() as f64)
        .collect();
    Ok(Detection {
        partition: Partition {
            blocks,
            values: Some(values),
        },
        vertex_values: means,
        drift,
    })
}
