//! JSON literal syntax for relations inside network files.

use serde::{Deserialize, Serialize};

use super::{MonotoneRelation, Point, RelationError, Tail};

/// A relation as written in a network file.
///
/// ```json
/// {"vertices": [[-1, -1], [1, 1]], "left_tail": "horizontal", "right_tail": {"slope": 0.5}}
/// {"affine": {"a": 1.0, "b": -1.2}}
/// {"named": "integrator"}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationLiteral {
    Points(PointsLiteral),
    Affine(AffineLiteral),
    Named(NamedLiteral),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsLiteral {
    pub vertices: Vec<[f64; 2]>,
    pub left_tail: TailLiteral,
    pub right_tail: TailLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineLiteral {
    pub affine: AffineCoefficients,
}

/// `y = a * u + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineCoefficients {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedLiteral {
    pub named: NamedRelation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedRelation {
    Identity,
    Integrator,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TailLiteral {
    Keyword(TailKeyword),
    Slope { slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailKeyword {
    Vertical,
    Horizontal,
}

impl From<TailLiteral> for Tail {
    fn from(t: TailLiteral) -> Self {
        match t {
            TailLiteral::Keyword(TailKeyword::Vertical) => Tail::Vertical,
            TailLiteral::Keyword(TailKeyword::Horizontal) => Tail::HORIZONTAL,
            TailLiteral::Slope { slope } => Tail::Slope(slope),
        }
    }
}

impl From<Tail> for TailLiteral {
    fn from(t: Tail) -> Self {
        match t {
            Tail::Vertical => TailLiteral::Keyword(TailKeyword::Vertical),
            Tail::Slope(0.0) => TailLiteral::Keyword(TailKeyword::Horizontal),
            Tail::Slope(slope) => TailLiteral::Slope { slope },
        }
    }
}

impl RelationLiteral {
    pub fn named(name: NamedRelation) -> Self {
        RelationLiteral::Named(NamedLiteral { named: name })
    }

    pub fn affine(a: f64, b: f64) -> Self {
        RelationLiteral::Affine(AffineLiteral {
            affine: AffineCoefficients { a, b },
        })
    }

    /// Vertex-list literal describing `r` exactly.
    pub fn from_relation(r: &MonotoneRelation) -> Self {
        RelationLiteral::Points(PointsLiteral {
            vertices: r.vertices().iter().map(|p| [p.u, p.y]).collect(),
            left_tail: r.left_tail().into(),
            right_tail: r.right_tail().into(),
        })
    }

    pub fn to_relation(&self) -> Result<MonotoneRelation, RelationError> {
        match self {
            RelationLiteral::Points(p) => {
                let pts: Vec<Point> = p.vertices.iter().map(|v| Point::new(v[0], v[1])).collect();
                MonotoneRelation::canonicalize(&pts, p.left_tail.into(), p.right_tail.into())
            }
            RelationLiteral::Affine(a) => MonotoneRelation::affine(a.affine.a, a.affine.b),
            RelationLiteral::Named(n) => Ok(match n.named {
                NamedRelation::Identity => MonotoneRelation::identity(),
                NamedRelation::Integrator => MonotoneRelation::integrator(),
                NamedRelation::Zero => MonotoneRelation::zero(),
            }),
        }
    }
}
