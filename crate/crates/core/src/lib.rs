//! Symmetry-induced clustering in diffusively coupled networks of
//! maximal equilibrium-independent passive (MEIP) agents and controllers.
//!
//! The crate is organised around the steady-state relations of the agents
//! and controllers:
//!
//! * [`relations`]: piecewise-linear maximal monotone relations, their convex
//!   potentials, conjugates and resolvents.
//! * [`network`]: graphs, incidence matrices, network files and vertex
//!   permutations.
//! * [`symmetry`]: weak automorphisms, the exchangeability partition and
//!   cluster prediction.
//! * [`steadystate`]: the network steady state as the minimizer of the
//!   optimal potential problem, with flow recovery and duality checks.
//! * [`simulator`]: RK4 closed-loop simulation and empirical cluster detection.
//! * [`synthesis`]: two-cluster synthesis for homogeneous agents.
//! * [`cli`]: the command-line front end.

// `!(x > 0.0)` and friends are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod network;
pub mod relations;
pub mod scenarios;
pub mod simulator;
pub mod steadystate;
pub mod symmetry;
pub mod synthesis;
