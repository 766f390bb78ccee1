use super::{Interval, MonotoneRelation, Point, Tail};

const MERGE_TOL: f64 = 1e-12;

/// `value + slope * (x - origin) + curvature / 2 * (x - origin)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub origin: f64,
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl Quadratic {
    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.origin;
        self.value + d * (self.slope + 0.5 * self.curvature * d)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.slope + self.curvature * (x - self.origin)
    }
}

/// One quadratic piece on `[lo, hi]`; `lo` may be `-inf` and `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwqPiece {
    pub lo: f64,
    pub hi: f64,
    pub q: Quadratic,
}

/// Convex piecewise-quadratic function, `+inf` outside its domain.
///
/// Pieces are contiguous and ordered. The domain is closed: a bounded end of
/// the domain is attained with a finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct PwqFunction {
    pieces: Vec<PwqPiece>,
}

/// Convex potential of `r`: its subdifferential is `r`, and the additive
/// constant is fixed by `f(anchor) = 0` (see [`PwqFunction::anchor`]).
pub fn integrate(r: &MonotoneRelation) -> PwqFunction {
    let v = r.vertices();
    let first = v[0];
    let last = v[v.len() - 1];
    let mut pieces = Vec::with_capacity(v.len() + 1);
    let mut value = 0.0;

    if let Tail::Slope(s) = r.left_tail() {
        pieces.push(PwqPiece {
            lo: f64::NEG_INFINITY,
            hi: first.u,
            q: Quadratic {
                origin: first.u,
                value: 0.0,
                slope: first.y,
                curvature: s,
            },
        });
    }
    for w in v.windows(2) {
        let (a, b) = (w[0], w[1]);
        let du = b.u - a.u;
        if du > 0.0 {
            pieces.push(PwqPiece {
                lo: a.u,
                hi: b.u,
                q: Quadratic {
                    origin: a.u,
                    value,
                    slope: a.y,
                    curvature: (b.y - a.y) / du,
                },
            });
            // exact for a linear derivative
            value += 0.5 * (a.y + b.y) * du;
        }
    }
    if let Tail::Slope(s) = r.right_tail() {
        pieces.push(PwqPiece {
            lo: last.u,
            hi: f64::INFINITY,
            q: Quadratic {
                origin: last.u,
                value,
                slope: last.y,
                curvature: s,
            },
        });
    }
    if pieces.is_empty() {
        pieces.push(PwqPiece {
            lo: first.u,
            hi: first.u,
            q: Quadratic {
                origin: first.u,
                value: 0.0,
                slope: 0.0,
                curvature: 0.0,
            },
        });
    }

    let mut f = PwqFunction { pieces }.simplified();
    let offset = f.eval(f.anchor());
    f.shift(-offset);
    f
}

impl PwqFunction {
    pub fn pieces(&self) -> &[PwqPiece] {
        &self.pieces
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Interior points where two pieces meet.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    /// Normalization point of [`integrate`]: the left end of the domain when
    /// it is bounded below, otherwise the point of the domain nearest to 0.
    pub fn anchor(&self) -> f64 {
        let d = self.domain();
        if d.lo.is_finite() {
            d.lo
        } else {
            d.hi.min(0.0)
        }
    }

    pub fn shift(&mut self, c: f64) {
        for p in &mut self.pieces {
            p.q.value += c;
        }
    }

    fn piece_at(&self, x: f64) -> Option<&PwqPiece> {
        let d = self.domain();
        if !d.contains(x) {
            return None;
        }
        let idx = self.pieces.partition_point(|p| p.hi < x);
        self.pieces.get(idx.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.piece_at(x) {
            Some(p) => p.q.eval(x),
            None => f64::INFINITY,
        }
    }

    /// The subdifferential at `x` as an interval; empty outside the domain.
    pub fn subgradient(&self, x: f64) -> Interval {
        let d = self.domain();
        if !d.contains(x) {
            return Interval::EMPTY;
        }
        let idx_left = self.pieces.partition_point(|p| p.hi < x);
        let idx_right = self.pieces.partition_point(|p| p.hi <= x);
        let lo = if x == d.lo {
            f64::NEG_INFINITY
        } else {
            self.pieces[idx_left].q.derivative(x)
        };
        let hi = if x == d.hi {
            f64::INFINITY
        } else {
            self.pieces[idx_right.min(self.pieces.len() - 1)].q.derivative(x)
        };
        Interval::new(lo, hi)
    }

    /// Largest violation of continuity or of nondecreasing slopes across
    /// breakpoints; zero for an exactly convex function.
    pub fn convexity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in &self.pieces {
            worst = worst.max(-p.q.curvature);
        }
        for w in self.pieces.windows(2) {
            let x = w[0].hi;
            worst = worst.max((w[0].q.eval(x) - w[1].q.eval(x)).abs());
            worst = worst.max(w[0].q.derivative(x) - w[1].q.derivative(x));
        }
        worst
    }

    /// The subdifferential as a canonical relation.
    pub fn subdifferential(&self) -> MonotoneRelation {
        let first = &self.pieces[0];
        let last = &self.pieces[self.pieces.len() - 1];
        let d = self.domain();
        if d.lo == d.hi {
            return MonotoneRelation::canonicalize(&[Point::new(d.lo, 0.0)], Tail::Vertical, Tail::Vertical)
                .expect("single vertex relation");
        }
        let mut pts = Vec::with_capacity(2 * self.pieces.len());
        let left = if d.lo.is_finite() {
            pts.push(Point::new(d.lo, first.q.derivative(d.lo)));
            Tail::Vertical
        } else {
            Tail::Slope(first.q.curvature)
        };
        for w in self.pieces.windows(2) {
            let x = w[0].hi;
            pts.push(Point::new(x, w[0].q.derivative(x)));
            pts.push(Point::new(x, w[1].q.derivative(x)));
        }
        let right = if d.hi.is_finite() {
            pts.push(Point::new(d.hi, last.q.derivative(d.hi)));
            Tail::Vertical
        } else {
            Tail::Slope(last.q.curvature)
        };
        if pts.is_empty() {
            pts.push(Point::new(first.q.origin, first.q.slope));
        }
        MonotoneRelation::canonicalize(&pts, left, right).expect("subdifferential of a convex function is monotone")
    }

    /// Legendre conjugate `f*(y) = sup_x { x y - f(x) }`, built piece by piece:
    /// quadratic pieces map to quadratic pieces with reciprocal curvature, and
    /// kinks of `f` map to linear pieces of `f*`.
    pub fn conjugate(&self) -> PwqFunction {
        let d = self.domain();
        if d.lo == d.hi {
            let x = d.lo;
            return PwqFunction {
                pieces: vec![PwqPiece {
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY,
                    q: Quadratic {
                        origin: 0.0,
                        value: -self.eval(x),
                        slope: x,
                        curvature: 0.0,
                    },
                }],
            };
        }

        // linear piece of f* with slope x on [y_lo, y_hi]
        let linear = |x: f64, fx: f64, y_lo: f64, y_hi: f64| {
            let origin = if y_lo.is_finite() { y_lo } else { y_hi };
            PwqPiece {
                lo: y_lo,
                hi: y_hi,
                q: Quadratic {
                    origin,
                    value: x * origin - fx,
                    slope: x,
                    curvature: 0.0,
                },
            }
        };

        let mut out: Vec<PwqPiece> = Vec::with_capacity(2 * self.pieces.len() + 2);
        let first = &self.pieces[0];
        if d.lo.is_finite() {
            let y0 = first.q.derivative(d.lo);
            out.push(linear(d.lo, first.q.eval(d.lo), f64::NEG_INFINITY, y0));
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                let prev = &self.pieces[i - 1];
                let x = p.lo;
                let (dl, dr) = (prev.q.derivative(x), p.q.derivative(x));
                if dr > dl {
                    out.push(linear(x, p.q.eval(x), dl, dr));
                }
            }
            let c = p.q.curvature;
            if c > 0.0 {
                let y_lo = if p.lo.is_finite() {
                    p.q.derivative(p.lo)
                } else {
                    f64::NEG_INFINITY
                };
                let y_hi = if p.hi.is_finite() {
                    p.q.derivative(p.hi)
                } else {
                    f64::INFINITY
                };
                let (x0, y0) = (p.q.origin, p.q.slope);
                out.push(PwqPiece {
                    lo: y_lo,
                    hi: y_hi,
                    q: Quadratic {
                        origin: y0,
                        value: x0 * y0 - p.q.value,
                        slope: x0,
                        curvature: 1.0 / c,
                    },
                });
            }
        }
        let last = &self.pieces[self.pieces.len() - 1];
        if d.hi.is_finite() {
            let y1 = last.q.derivative(d.hi);
            out.push(linear(d.hi, last.q.eval(d.hi), y1, f64::INFINITY));
        }

        if out.is_empty() {
            // f is affine on the whole line: f* lives on the single slope value
            let y = first.q.slope;
            out.push(PwqPiece {
                lo: y,
                hi: y,
                q: Quadratic {
                    origin: y,
                    value: first.q.origin * y - first.q.value,
                    slope: 0.0,
                    curvature: 0.0,
                },
            });
        }
        PwqFunction { pieces: out }.simplified()
    }

    /// Merges neighbours that are the same quadratic.
    fn simplified(mut self) -> Self {
        let mut merged: Vec<PwqPiece> = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            if let Some(prev) = merged.last_mut() {
                let x = prev.hi;
                let same_curvature =
                    (prev.q.curvature - p.q.curvature).abs() <= MERGE_TOL * 1f64.max(prev.q.curvature.abs());
                let dl = prev.q.derivative(x);
                let dr = p.q.derivative(x);
                let smooth = (dl - dr).abs() <= MERGE_TOL * 1f64.max(dl.abs()).max(dr.abs());
                if same_curvature && smooth {
                    prev.hi = p.hi;
                    continue;
                }
            }
            merged.push(p);
        }
        PwqFunction { pieces: merged }
    }
}
