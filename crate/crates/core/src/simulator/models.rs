//! SISO dynamical models for agents and controllers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relations::{MonotoneRelation, RelationError, RelationLiteral};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("first-order model needs a > 0, got {0}")]
    UnstablePole(f64),
    #[error("first-order model has negative DC gain {0}")]
    NegativeGain(f64),
    #[error("non-finite model parameter")]
    NonFinite,
    #[error("static model needs a single-valued relation")]
    NotSingleValued,
    #[error("gradient model needs a relation whose inverse is single-valued")]
    InverseNotSingleValued,
    #[error("relation has neither a single-valued graph nor a single-valued inverse; supply a model")]
    NotRealizable,
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// How the output depends on the instantaneous input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feedthrough {
    None,
    /// `h(x, v) = h(x, 0) + gain * v`.
    Affine {
        gain: f64,
    },
    /// Nonlinear in `v` with slope at most `max_gain`.
    Nonlinear {
        max_gain: f64,
    },
}

/// A scalar-input scalar-output system `x' = f(x, v)`, `y = h(x, v)` with at
/// most one state.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicModel {
    /// `x' = -a x + b v`, `y = c x + d v`, `a > 0`.
    FirstOrder { a: f64, b: f64, c: f64, d: f64 },
    /// `x' = v`, `y = x`.
    Integrator,
    /// `x' = -tanh(x) + v`, `y = tanh(x)`. Equilibria exist only for `|v| < 1`.
    TanhLag,
    /// `x' = -x + sinh(v)`, `y = asinh(x)`.
    SinhLag,
    /// Memoryless `y = k(v)`.
    Static(MonotoneRelation),
    /// `x' = -x + v`, `y = k(x)`.
    Lagged(MonotoneRelation),
    /// `x' = v - k^{-1}(x)`, `y = x`.
    Gradient {
        relation: MonotoneRelation,
        inverse: MonotoneRelation,
    },
}

impl DynamicModel {
    pub fn first_order(a: f64, b: f64, c: f64, d: f64) -> Result<Self, ModelError> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        if a <= 0.0 {
            return Err(ModelError::UnstablePole(a));
        }
        let gain = c * b / a + d;
        if gain < 0.0 {
            return Err(ModelError::NegativeGain(gain));
        }
        Ok(DynamicModel::FirstOrder { a, b, c, d })
    }

    pub fn static_map(k: MonotoneRelation) -> Result<Self, ModelError> {
        if !k.is_function() {
            return Err(ModelError::NotSingleValued);
        }
        Ok(DynamicModel::Static(k))
    }

    pub fn lagged(k: MonotoneRelation) -> Result<Self, ModelError> {
        if !k.is_function() {
            return Err(ModelError::NotSingleValued);
        }
        Ok(DynamicModel::Lagged(k))
    }

    pub fn gradient(k: MonotoneRelation) -> Result<Self, ModelError> {
        let inverse = k.inverse();
        if !inverse.is_function() {
            return Err(ModelError::InverseNotSingleValued);
        }
        Ok(DynamicModel::Gradient { relation: k, inverse })
    }

    /// Default dynamic realization of an agent given only by its relation.
    pub fn realize_agent(k: &MonotoneRelation) -> Result<Self, ModelError> {
        if k.is_function() {
            Ok(DynamicModel::Lagged(k.clone()))
        } else if k.inverse().is_function() {
            Self::gradient(k.clone())
        } else {
            Err(ModelError::NotRealizable)
        }
    }

    /// Default realization of a controller given only by its relation.
    pub fn realize_controller(k: &MonotoneRelation) -> Result<Self, ModelError> {
        if k.is_function() {
            Ok(DynamicModel::Static(k.clone()))
        } else if k.inverse().is_function() {
            Self::gradient(k.clone())
        } else {
            Err(ModelError::NotRealizable)
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            DynamicModel::Static(_) => 0,
            _ => 1,
        }
    }

    pub fn drift(&self, x: f64, v: f64) -> f64 {
        match self {
            DynamicModel::FirstOrder { a, b, .. } => -a * x + b * v,
            DynamicModel::Integrator => v,
            DynamicModel::TanhLag => -x.tanh() + v,
            DynamicModel::SinhLag => -x + v.sinh(),
            DynamicModel::Static(_) => 0.0,
            DynamicModel::Lagged(_) => -x + v,
            DynamicModel::Gradient { inverse, .. } => v - inverse.evaluate(x).lo,
        }
    }

    pub fn output(&self, x: f64, v: f64) -> f64 {
        match self {
            DynamicModel::FirstOrder { c, d, .. } => c * x + d * v,
            DynamicModel::Integrator => x,
            DynamicModel::TanhLag => x.tanh(),
            DynamicModel::SinhLag => x.asinh(),
            DynamicModel::Static(k) => k.evaluate(v).lo,
            DynamicModel::Lagged(k) => k.evaluate(x).lo,
            DynamicModel::Gradient { .. } => x,
        }
    }

    pub fn feedthrough(&self) -> Feedthrough {
        match self {
            DynamicModel::FirstOrder { d, .. } if *d != 0.0 => Feedthrough::Affine { gain: *d },
            DynamicModel::Static(k) => match k.as_affine() {
                Some((slope, _)) => Feedthrough::Affine { gain: slope },
                None => Feedthrough::Nonlinear {
                    max_gain: k.max_slope(),
                },
            },
            _ => Feedthrough::None,
        }
    }

    /// The set of constant input/output pairs of the model.
    pub fn steady_state_relation(&self) -> MonotoneRelation {
        match self {
            DynamicModel::FirstOrder { a, b, c, d } => {
                MonotoneRelation::affine(c * b / a + d, 0.0).expect("validated nonnegative gain")
            }
            DynamicModel::Integrator => MonotoneRelation::integrator(),
            DynamicModel::TanhLag | DynamicModel::SinhLag => MonotoneRelation::identity(),
            DynamicModel::Static(k) | DynamicModel::Lagged(k) => k.clone(),
            DynamicModel::Gradient { relation, .. } => relation.clone(),
        }
    }
}

/// A model reference in a network file: `{"model": "lag"}` or
/// `{"model": {"first_order": {"a": 1, "b": 1, "c": 1, "d": 0}}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelLiteral {
    pub model: ModelKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    /// `y = u`.
    StaticIdentity,
    /// `x' = -x + u`, `y = x` (transfer function `1/(s+1)`).
    Lag,
    /// `x' = -10x + u`, `y = 10x`.
    FastLag,
    /// `x' = -tanh(x) + u`, `y = tanh(x)`.
    TanhLag,
    /// `x' = -x + sinh(u)`, `y = asinh(x)`.
    SinhLag,
    /// `x' = -x + u`, `y = (x + u) / 2`.
    FeedthroughLag,
    /// `s/(2s+1)` as `x' = -x/2 + u/2`, `y = -x/2 + u/2`.
    Washout,
    Integrator,
    FirstOrder {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    Static(RelationLiteral),
    Lagged(RelationLiteral),
    Gradient(RelationLiteral),
}

impl ModelKind {
    pub fn build(&self) -> Result<DynamicModel, ModelError> {
        match self {
            ModelKind::StaticIdentity => DynamicModel::static_map(MonotoneRelation::identity()),
            ModelKind::Lag => DynamicModel::first_order(1.0, 1.0, 1.0, 0.0),
            ModelKind::FastLag => DynamicModel::first_order(10.0, 1.0, 10.0, 0.0),
            ModelKind::TanhLag => Ok(DynamicModel::TanhLag),
            ModelKind::SinhLag => Ok(DynamicModel::SinhLag),
            ModelKind::FeedthroughLag => DynamicModel::first_order(1.0, 1.0, 0.5, 0.5),
            ModelKind::Washout => DynamicModel::first_order(0.5, 0.5, -0.5, 0.5),
            ModelKind::Integrator => Ok(DynamicModel::Integrator),
            ModelKind::FirstOrder { a, b, c, d } => DynamicModel::first_order(*a, *b, *c, *d),
            ModelKind::Static(r) => DynamicModel::static_map(r.to_relation()?),
            ModelKind::Lagged(r) => DynamicModel::lagged(r.to_relation()?),
            ModelKind::Gradient(r) => DynamicModel::gradient(r.to_relation()?),
        }
    }
}
