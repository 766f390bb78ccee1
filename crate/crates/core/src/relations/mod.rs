//! Scalar maximal monotone relations and their convex potentials.
//!
//! A [`MonotoneRelation`] is a piecewise-linear monotone curve in the
//! `(u, y)` plane: a finite vertex chain whose segments may be vertical,
//! horizontal or of positive slope, closed off by a ray at each end. Because
//! both end rays always exist, every value of this type is maximal monotone.
//!
//! Integrating a relation gives a piecewise-quadratic convex function
//! ([`PwqFunction`]) whose subdifferential is the relation again; the
//! Legendre conjugate of that function integrates the inverse relation.

mod interval;
mod library;
mod literal;
mod pwq;

pub use interval::Interval;
pub use library::{library, saturation};
pub use literal::{
    AffineCoefficients, AffineLiteral, NamedLiteral, NamedRelation, PointsLiteral, RelationLiteral, TailKeyword,
    TailLiteral,
};
pub use pwq::{integrate, PwqFunction, PwqPiece, Quadratic};

use thiserror::Error;

/// Coordinate tolerance used when comparing canonical forms.
pub const EQUIVALENCE_TOL: f64 = 1e-12;

const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("relation needs at least one vertex")]
    Empty,
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("coordinates decrease between vertex {0} and vertex {1}")]
    NonMonotoneInput(usize, usize),
    #[error("tail slope must be finite and nonnegative, got {0}")]
    InvalidTail(f64),
    #[error("resolvent step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("no resolvent solution for v = {0}")]
    NoSolution(f64),
    #[error("unknown named relation `{0}`")]
    UnknownName(String),
    #[error("affine relation needs a finite nonnegative slope, got {0}")]
    InvalidAffine(f64),
}

/// A point of a relation: steady-state input `u` and output `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub u: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(u: f64, y: f64) -> Self {
        Self { u, y }
    }
}

/// End ray of a relation. `Slope(0.0)` is the horizontal ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    Vertical,
    Slope(f64),
}

impl Tail {
    pub const HORIZONTAL: Tail = Tail::Slope(0.0);

    /// Unit direction of the ray pointing away from the curve toward `+inf`.
    fn direction(self) -> (f64, f64) {
        match self {
            Tail::Vertical => (0.0, 1.0),
            Tail::Slope(s) => {
                let n = (1.0 + s * s).sqrt();
                (1.0 / n, s / n)
            }
        }
    }

    /// Direction as an unnormalized `(du, dy)` pair, `du` in {0, 1}.
    fn step(self) -> (f64, f64) {
        match self {
            Tail::Vertical => (0.0, 1.0),
            Tail::Slope(s) => (1.0, s),
        }
    }

    fn swapped(self) -> Tail {
        match self {
            Tail::Vertical => Tail::HORIZONTAL,
            Tail::Slope(0.0) => Tail::Vertical,
            Tail::Slope(s) => Tail::Slope(1.0 / s),
        }
    }

    fn is_strict(self) -> bool {
        matches!(self, Tail::Slope(s) if s > 0.0)
    }

    fn approx_eq(self, other: Tail, tol: f64) -> bool {
        match (self, other) {
            (Tail::Vertical, Tail::Vertical) => true,
            (Tail::Slope(a), Tail::Slope(b)) => close(a, b, tol),
            _ => false,
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn same_point(a: Point, b: Point, tol: f64) -> bool {
    close(a.u, b.u, tol) && close(a.y, b.y, tol)
}

fn collinear(d1: (f64, f64), d2: (f64, f64)) -> bool {
    let n1 = d1.0.hypot(d1.1);
    let n2 = d2.0.hypot(d2.1);
    (d1.0 * d2.1 - d1.1 * d2.0).abs() <= COLLINEAR_TOL * n1 * n2
}

/// Canonical piecewise-linear maximal monotone relation.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneRelation {
    vertices: Vec<Point>,
    left: Tail,
    right: Tail,
}

impl MonotoneRelation {
    /// Builds the canonical relation through `raw` closed by the two tails.
    ///
    /// Duplicate vertices are removed and interior vertices between collinear
    /// segments are merged. The end vertices are kept even when a tail
    /// continues the adjacent segment.
    pub fn canonicalize(raw: &[Point], left: Tail, right: Tail) -> Result<Self, RelationError> {
        if raw.is_empty() {
            return Err(RelationError::Empty);
        }
        for tail in [left, right] {
            if let Tail::Slope(s) = tail {
                if !s.is_finite() || s < 0.0 {
                    return Err(RelationError::InvalidTail(s));
                }
            }
        }
        for (i, p) in raw.iter().enumerate() {
            if !p.u.is_finite() || !p.y.is_finite() {
                return Err(RelationError::NonFinite(i));
            }
        }
        for i in 1..raw.len() {
            let (a, b) = (raw[i - 1], raw[i]);
            let u_down = b.u < a.u && !close(a.u, b.u, EQUIVALENCE_TOL);
            let y_down = b.y < a.y && !close(a.y, b.y, EQUIVALENCE_TOL);
            if u_down || y_down {
                return Err(RelationError::NonMonotoneInput(i - 1, i));
            }
        }

        let mut pts: Vec<Point> = Vec::with_capacity(raw.len());
        for &p in raw {
            match pts.last() {
                Some(&last) if same_point(last, p, EQUIVALENCE_TOL) => {}
                Some(&last) => {
                    // snap coordinates that only differ by rounding noise
                    let u = if close(last.u, p.u, EQUIVALENCE_TOL) {
                        last.u
                    } else {
                        p.u
                    };
                    let y = if close(last.y, p.y, EQUIVALENCE_TOL) {
                        last.y
                    } else {
                        p.y
                    };
                    pts.push(Point::new(u, y));
                }
                None => pts.push(p),
            }
        }

        let mut merged: Vec<Point> = Vec::with_capacity(pts.len());
        for p in pts {
            while merged.len() >= 2 {
                let a = merged[merged.len() - 2];
                let b = merged[merged.len() - 1];
                if collinear((b.u - a.u, b.y - a.y), (p.u - b.u, p.y - b.y)) {
                    merged.pop();
                } else {
                    break;
                }
            }
            merged.push(p);
        }

        Ok(Self {
            vertices: merged,
            left,
            right,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn left_tail(&self) -> Tail {
        self.left
    }

    pub fn right_tail(&self) -> Tail {
        self.right
    }

    /// `y = u`.
    pub fn identity() -> Self {
        Self::affine(1.0, 0.0).expect("unit slope is valid")
    }

    /// `y = 0` for every input.
    pub fn zero() -> Self {
        Self::affine(0.0, 0.0).expect("zero slope is valid")
    }

    /// Steady-state relation of the single integrator: `{(0, y) : y real}`.
    pub fn integrator() -> Self {
        Self {
            vertices: vec![Point::new(0.0, 0.0)],
            left: Tail::Vertical,
            right: Tail::Vertical,
        }
    }

    /// `y = slope * u + offset`, `slope >= 0`.
    pub fn affine(slope: f64, offset: f64) -> Result<Self, RelationError> {
        if !slope.is_finite() || slope < 0.0 || !offset.is_finite() {
            return Err(RelationError::InvalidAffine(slope));
        }
        Ok(Self {
            vertices: vec![Point::new(0.0, offset)],
            left: Tail::Slope(slope),
            right: Tail::Slope(slope),
        })
    }

    /// The set `{y : (u, y) in self}` as a closed interval.
    pub fn evaluate(&self, u: f64) -> Interval {
        let mut out = Interval::EMPTY;
        let first = self.vertices[0];
        let last = self.vertices[self.vertices.len() - 1];

        match self.left {
            Tail::Vertical if u == first.u => out = out.hull(Interval::new(f64::NEG_INFINITY, first.y)),
            Tail::Slope(s) if u <= first.u => {
                let y = first.y - s * (first.u - u);
                out = out.hull(Interval::point(y));
            }
            _ => {}
        }
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.u == b.u {
                if u == a.u {
                    out = out.hull(Interval::new(a.y, b.y));
                }
            } else if a.u <= u && u <= b.u {
                let t = (u - a.u) / (b.u - a.u);
                out = out.hull(Interval::point(a.y + t * (b.y - a.y)));
            }
        }
        match self.right {
            Tail::Vertical if u == last.u => out = out.hull(Interval::new(last.y, f64::INFINITY)),
            Tail::Slope(s) if u >= last.u => {
                let y = last.y + s * (u - last.u);
                out = out.hull(Interval::point(y));
            }
            _ => {}
        }
        out
    }

    /// Input projection of the relation (the domain of its potential).
    pub fn domain(&self) -> Interval {
        let lo = match self.left {
            Tail::Vertical => self.vertices[0].u,
            Tail::Slope(_) => f64::NEG_INFINITY,
        };
        let hi = match self.right {
            Tail::Vertical => self.vertices[self.vertices.len() - 1].u,
            Tail::Slope(_) => f64::INFINITY,
        };
        Interval::new(lo, hi)
    }

    /// Output projection of the relation.
    pub fn range(&self) -> Interval {
        self.inverse().domain()
    }

    /// Swaps the roles of input and output.
    pub fn inverse(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| Point::new(p.y, p.u)).collect(),
            left: self.left.swapped(),
            right: self.right.swapped(),
        }
    }

    /// Point reflection through the origin: `{(-u, -y) : (u, y) in self}`.
    pub fn reflect(&self) -> Self {
        Self {
            vertices: self.vertices.iter().rev().map(|p| Point::new(-p.u, -p.y)).collect(),
            left: self.right,
            right: self.left,
        }
    }

    /// The relation `u -> self(u + d)`, i.e. the graph shifted left by `d`.
    pub fn with_input_offset(&self, d: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| Point::new(p.u - d, p.y)).collect(),
            left: self.left,
            right: self.right,
        }
    }

    /// `(I + alpha * self)^{-1}(v)`: the unique `u` with `v - u in alpha * self(u)`.
    pub fn resolvent(&self, alpha: f64, v: f64) -> Result<f64, RelationError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(RelationError::InvalidStep(alpha));
        }
        if !v.is_finite() {
            return Err(RelationError::NoSolution(v));
        }
        let level = |p: Point| p.u + alpha * p.y;
        let first = self.vertices[0];
        let last = self.vertices[self.vertices.len() - 1];

        let g0 = level(first);
        if v <= g0 {
            let (du, dy) = self.left.step();
            let t = (g0 - v) / (du + alpha * dy);
            return Ok(first.u - t * du);
        }
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ga, gb) = (level(a), level(b));
            if v <= gb {
                let lambda = ((v - ga) / (gb - ga)).clamp(0.0, 1.0);
                return Ok(a.u + lambda * (b.u - a.u));
            }
        }
        let gl = level(last);
        let (du, dy) = self.right.step();
        let t = (v - gl) / (du + alpha * dy);
        Ok(last.u + t * du)
    }

    /// True when the relation has no vertical or horizontal pieces, which is
    /// the steady-state signature of an output-strictly MEIP system.
    pub fn is_strictly_monotone(&self) -> bool {
        self.left.is_strict()
            && self.right.is_strict()
            && self.vertices.windows(2).all(|w| w[1].u > w[0].u && w[1].y > w[0].y)
    }

    /// True when every input in the domain has exactly one output.
    pub fn is_function(&self) -> bool {
        !matches!(self.left, Tail::Vertical)
            && !matches!(self.right, Tail::Vertical)
            && self.vertices.windows(2).all(|w| w[1].u > w[0].u)
    }

    /// Largest slope `dy/du` over the non-vertical pieces.
    pub fn max_slope(&self) -> f64 {
        let mut s: f64 = 0.0;
        for t in [self.left, self.right] {
            match t {
                Tail::Slope(v) => s = s.max(v),
                Tail::Vertical => s = f64::INFINITY,
            }
        }
        for w in self.vertices.windows(2) {
            let du = w[1].u - w[0].u;
            s = s.max(if du > 0.0 {
                (w[1].y - w[0].y) / du
            } else {
                f64::INFINITY
            });
        }
        s
    }

    /// Affine description `(slope, offset)` when the relation is a single
    /// non-vertical line.
    pub fn as_affine(&self) -> Option<(f64, f64)> {
        let c = self.corner_form();
        if !c.vertices.is_empty() {
            return None;
        }
        match c.left {
            Tail::Slope(s) => Some((s, c.anchor.y - s * c.anchor.u)),
            Tail::Vertical => None,
        }
    }

    /// Same relation up to `tol` (relative) on the corner coordinates.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let a = self.corner_form();
        let b = other.corner_form();
        a.left.approx_eq(b.left, tol)
            && a.right.approx_eq(b.right, tol)
            && a.vertices.len() == b.vertices.len()
            && a.vertices.iter().zip(&b.vertices).all(|(p, q)| same_point(*p, *q, tol))
            && (!a.vertices.is_empty() || same_point(a.anchor, b.anchor, tol))
    }

    /// Weak equivalence of two systems is equality of their relations.
    pub fn weakly_equivalent(&self, other: &Self) -> bool {
        self.approx_eq(other, EQUIVALENCE_TOL)
    }

    /// Whether `self(-u) = -self(u)` for every `u`.
    pub fn is_odd(&self) -> bool {
        self.weakly_equivalent(&self.reflect())
    }

    /// Reduced form used for equality: end vertices that a tail merely
    /// continues are dropped, and a relation without corners is a single
    /// line pinned at a fixed anchor.
    fn corner_form(&self) -> CornerForm {
        let v = &self.vertices;
        let n = v.len();
        let seg = |i: usize| (v[i + 1].u - v[i].u, v[i + 1].y - v[i].y);
        let drop_first = n >= 2 && collinear(self.left.direction(), seg(0));
        let drop_last = n >= 2 && collinear(self.right.direction(), seg(n - 2));
        let start = usize::from(drop_first);
        let end = if drop_last { n - 1 } else { n };
        let kept: Vec<Point> = if start < end {
            v[start..end].to_vec()
        } else {
            Vec::new()
        };

        let is_line = match kept.len() {
            0 => true,
            1 => n == 1 && collinear(self.left.direction(), self.right.direction()),
            _ => false,
        };
        if is_line {
            let p = v[0];
            let anchor = match self.left {
                Tail::Vertical => Point::new(p.u, 0.0),
                Tail::Slope(s) => Point::new(0.0, p.y - s * p.u),
            };
            return CornerForm {
                vertices: Vec::new(),
                anchor,
                left: self.left,
                right: self.left,
            };
        }
        CornerForm {
            vertices: kept,
            anchor: v[0],
            left: self.left,
            right: self.right,
        }
    }

    /// Euclidean distance from `(u, y)` to the curve.
    pub fn distance_to(&self, u: f64, y: f64) -> f64 {
        let q = Point::new(u, y);
        let first = self.vertices[0];
        let last = self.vertices[self.vertices.len() - 1];
        let mut best = f64::INFINITY;
        let (du, dy) = self.left.step();
        best = best.min(ray_distance(first, (-du, -dy), q));
        let (du, dy) = self.right.step();
        best = best.min(ray_distance(last, (du, dy), q));
        for w in self.vertices.windows(2) {
            best = best.min(segment_distance(w[0], w[1], q));
        }
        best
    }
}

struct CornerForm {
    vertices: Vec<Point>,
    anchor: Point,
    left: Tail,
    right: Tail,
}

fn ray_distance(origin: Point, dir: (f64, f64), q: Point) -> f64 {
    let (px, py) = (q.u - origin.u, q.y - origin.y);
    let t = ((px * dir.0 + py * dir.1) / (dir.0 * dir.0 + dir.1 * dir.1)).max(0.0);
    (px - t * dir.0).hypot(py - t * dir.1)
}

fn segment_distance(a: Point, b: Point, q: Point) -> f64 {
    let d = (b.u - a.u, b.y - a.y);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let (px, py) = (q.u - a.u, q.y - a.y);
    let t = if len2 > 0.0 {
        ((px * d.0 + py * d.1) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (px - t * d.0).hypot(py - t * d.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, y: f64) -> Point {
        Point::new(u, y)
    }

    fn gamma1() -> MonotoneRelation {
        MonotoneRelation::affine(1.0, -1.2).unwrap()
    }

    #[test]
    fn collinear_interior_vertex_is_merged() {
        let r = MonotoneRelation::canonicalize(
            &[p(-1.0, -1.0), p(0.0, 0.0), p(1.0, 1.0)],
            Tail::Slope(1.0),
            Tail::Slope(1.0),
        )
        .unwrap();
        // oracle: pairwise slopes of consecutive segments are both 1
        let s1 = (0.0 - -1.0) / (0.0 - -1.0);
        let s2 = (1.0 - 0.0) / (1.0 - 0.0);
        assert_eq!(s1, s2);
        assert_eq!(r.vertices(), &[p(-1.0, -1.0), p(1.0, 1.0)]);
        assert_eq!(r.left_tail(), Tail::Slope(1.0));
        assert_eq!(r.right_tail(), Tail::Slope(1.0));
        assert!(r.weakly_equivalent(&MonotoneRelation::identity()));
    }

    #[test]
    fn integrator_is_already_canonical() {
        let r = MonotoneRelation::canonicalize(&[p(0.0, 0.0)], Tail::Vertical, Tail::Vertical).unwrap();
        assert_eq!(r, MonotoneRelation::integrator());
    }

    #[test]
    fn duplicates_are_removed() {
        let r = MonotoneRelation::canonicalize(&[p(2.0, 3.0), p(2.0, 3.0)], Tail::Vertical, Tail::Vertical).unwrap();
        assert_eq!(r.vertices(), &[p(2.0, 3.0)]);
    }

    #[test]
    fn decreasing_input_is_rejected() {
        let err =
            MonotoneRelation::canonicalize(&[p(0.0, 0.0), p(-1.0, 1.0)], Tail::Vertical, Tail::Vertical).unwrap_err();
        assert_eq!(err, RelationError::NonMonotoneInput(0, 1));
        let err =
            MonotoneRelation::canonicalize(&[p(0.0, 1.0), p(1.0, 0.0)], Tail::Vertical, Tail::Vertical).unwrap_err();
        assert_eq!(err, RelationError::NonMonotoneInput(0, 1));
        assert!(matches!(
            MonotoneRelation::canonicalize(&[p(0.0, 0.0)], Tail::Slope(-1.0), Tail::Vertical),
            Err(RelationError::InvalidTail(_))
        ));
        assert_eq!(
            MonotoneRelation::canonicalize(&[], Tail::Vertical, Tail::Vertical),
            Err(RelationError::Empty)
        );
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(MonotoneRelation::identity().evaluate(3.0), Interval::point(3.0));
        let int = MonotoneRelation::integrator();
        assert_eq!(int.evaluate(0.0), Interval::new(f64::NEG_INFINITY, f64::INFINITY));
        assert!(int.evaluate(0.1).is_empty());

        let r = MonotoneRelation::canonicalize(
            &[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 2.0), p(2.0, 2.0)],
            Tail::Vertical,
            Tail::Vertical,
        )
        .unwrap();
        assert_eq!(r.evaluate(1.0), Interval::new(0.0, 2.0));
        // dense grid oracle: points of the vertical segment at u = 1
        let hits: Vec<f64> = (0..=400)
            .map(|k| -1.0 + k as f64 * 0.01)
            .filter(|&y| r.distance_to(1.0, y) < 1e-12)
            .collect();
        assert!((hits.first().unwrap() - 0.0).abs() < 1e-9);
        assert!((hits.last().unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_examples() {
        let id = MonotoneRelation::identity();
        assert!(id.inverse().weakly_equivalent(&id));
        assert!(MonotoneRelation::integrator()
            .inverse()
            .weakly_equivalent(&MonotoneRelation::zero()));
        let g = gamma1();
        assert_eq!(g.inverse().inverse(), g);
        let shifted = MonotoneRelation::affine(1.0, 1.2).unwrap();
        assert!(g.inverse().approx_eq(&shifted, 1e-12));
        for y in [-2.0, 0.0, 0.5, 3.0] {
            let u = g.inverse().evaluate(y).lo;
            assert!((g.evaluate(u).lo - y).abs() < 1e-12);
        }
    }

    #[test]
    fn resolvent_examples() {
        assert_eq!(MonotoneRelation::identity().resolvent(1.0, 4.0).unwrap(), 2.0);
        for alpha in [0.1, 1.0, 7.0] {
            for v in [-3.0, 0.0, 2.5] {
                assert_eq!(MonotoneRelation::integrator().resolvent(alpha, v).unwrap(), 0.0);
            }
        }
        // bisection oracle on y + 2 (y - 1.2) = 0
        let (mut lo, mut hi) = (-10.0_f64, 10.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + 2.0 * (mid - 1.2) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let got = gamma1().resolvent(2.0, 0.0).unwrap();
        assert!((got - 0.8).abs() < 1e-12);
        assert!((got - lo).abs() < 1e-12);
        assert!(matches!(
            gamma1().resolvent(0.0, 1.0),
            Err(RelationError::InvalidStep(_))
        ));
        assert!(matches!(
            gamma1().resolvent(1.0, f64::NAN),
            Err(RelationError::NoSolution(_))
        ));
    }

    #[test]
    fn resolvent_on_vertical_segment() {
        // sign-like relation: vertical at 0 between -1 and 1, horizontal tails
        let r =
            MonotoneRelation::canonicalize(&[p(0.0, -1.0), p(0.0, 1.0)], Tail::HORIZONTAL, Tail::HORIZONTAL).unwrap();
        assert_eq!(r.resolvent(1.0, 0.5).unwrap(), 0.0);
        assert_eq!(r.resolvent(1.0, 3.0).unwrap(), 2.0);
        assert_eq!(r.resolvent(1.0, -3.0).unwrap(), -2.0);
    }

    #[test]
    fn weak_equivalence_examples() {
        let id = MonotoneRelation::identity();
        let also_id =
            MonotoneRelation::canonicalize(&[p(-3.0, -3.0), p(5.0, 5.0)], Tail::Slope(1.0), Tail::Slope(1.0)).unwrap();
        assert!(id.weakly_equivalent(&also_id));
        assert!(!id.weakly_equivalent(&MonotoneRelation::zero()));
        let g = gamma1();
        assert!(g.weakly_equivalent(&g));
        assert!(!g.weakly_equivalent(&id));
    }

    #[test]
    fn oddness_examples() {
        assert!(MonotoneRelation::identity().is_odd());
        assert!(!gamma1().is_odd());
        assert!(saturation(1.0).is_odd());
        assert!(MonotoneRelation::integrator().is_odd());
        let shifted_sat =
            MonotoneRelation::canonicalize(&[p(0.0, 0.0), p(1.0, 1.0)], Tail::HORIZONTAL, Tail::HORIZONTAL).unwrap();
        assert!(!shifted_sat.is_odd());
    }

    #[test]
    fn reflection_oracle_for_saturation() {
        let sat = saturation(1.0);
        for k in -40..=40 {
            let u = k as f64 * 0.1;
            let a = sat.evaluate(u);
            let b = sat.evaluate(-u);
            assert!((a.lo + b.hi).abs() < 1e-15);
            assert!((a.hi + b.lo).abs() < 1e-15);
        }
    }

    #[test]
    fn strictness_and_function_flags() {
        assert!(MonotoneRelation::identity().is_strictly_monotone());
        assert!(!MonotoneRelation::zero().is_strictly_monotone());
        assert!(!MonotoneRelation::integrator().is_function());
        assert!(saturation(2.0).is_function());
        assert!(!saturation(2.0).is_strictly_monotone());
        assert_eq!(gamma1().as_affine(), Some((1.0, -1.2)));
        assert_eq!(saturation(1.0).as_affine(), None);
    }

    #[test]
    fn domain_and_range() {
        let sat = saturation(1.0);
        assert_eq!(sat.domain(), Interval::new(f64::NEG_INFINITY, f64::INFINITY));
        assert_eq!(sat.range(), Interval::new(-1.0, 1.0));
        assert_eq!(MonotoneRelation::integrator().domain(), Interval::point(0.0));
    }
}
