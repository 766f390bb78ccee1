use super::{MonotoneRelation, Point, Tail};

/// `y = clamp(u, -level, level)`.
pub fn saturation(level: f64) -> MonotoneRelation {
    MonotoneRelation::canonicalize(
        &[Point::new(-level, -level), Point::new(level, level)],
        Tail::HORIZONTAL,
        Tail::HORIZONTAL,
    )
    .expect("saturation level must be positive")
}

/// Named relations used across tests and examples.
pub fn library() -> Vec<(&'static str, MonotoneRelation)> {
    let p = Point::new;
    let canon = |v: &[Point], l: Tail, r: Tail| MonotoneRelation::canonicalize(v, l, r).expect("library relation");
    vec![
        ("identity", MonotoneRelation::identity()),
        ("zero", MonotoneRelation::zero()),
        ("integrator", MonotoneRelation::integrator()),
        ("shifted_identity", MonotoneRelation::affine(1.0, -1.2).expect("affine")),
        ("steep_affine", MonotoneRelation::affine(10.0, 0.5).expect("affine")),
        ("saturation", saturation(1.0)),
        (
            "dead_zone",
            canon(&[p(-1.0, 0.0), p(1.0, 0.0)], Tail::Slope(1.0), Tail::Slope(1.0)),
        ),
        (
            "relay",
            canon(&[p(0.0, -1.0), p(0.0, 1.0)], Tail::HORIZONTAL, Tail::HORIZONTAL),
        ),
        (
            "friction",
            canon(&[p(0.0, -1.0), p(0.0, 1.0)], Tail::Slope(0.5), Tail::Slope(0.5)),
        ),
        (
            "box_constraint",
            canon(&[p(-1.0, 0.0), p(1.0, 0.0)], Tail::Vertical, Tail::Vertical),
        ),
        (
            "clipped_ramp",
            canon(
                &[p(-2.0, -3.0), p(-2.0, -1.0), p(0.0, 0.0), p(3.0, 0.5), p(3.0, 2.0)],
                Tail::Vertical,
                Tail::Slope(2.0),
            ),
        ),
        (
            "staircase",
            canon(
                &[p(-1.0, 0.0), p(-1.0, 1.0), p(1.0, 1.0), p(1.0, 2.0)],
                Tail::HORIZONTAL,
                Tail::HORIZONTAL,
            ),
        ),
        (
            "convex_kinks",
            canon(
                &[p(-1.0, -2.0), p(0.0, 0.0), p(2.0, 0.5)],
                Tail::Slope(4.0),
                Tail::Slope(0.1),
            ),
        ),
    ]
}
