#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symclust::network::{Assumption, Element, Graph, Network};
use symclust::relations::{MonotoneRelation, Point, Tail};
use symclust::simulator::DynamicModel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_tail(rng: &mut ChaCha8Rng) -> Tail {
    match rng.random_range(0..4) {
        0 => Tail::Vertical,
        1 => Tail::HORIZONTAL,
        _ => Tail::Slope(rng.random_range(0.1..3.0)),
    }
}

/// Random maximal monotone piecewise-linear relation, possibly with
/// vertical and horizontal pieces.
pub fn random_relation(rng: &mut ChaCha8Rng) -> MonotoneRelation {
    loop {
        let k = rng.random_range(1..=4);
        let mut p = Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let mut pts = vec![p];
        for _ in 1..k {
            let (du, dy) = match rng.random_range(0..3) {
                0 => (0.0, rng.random_range(0.2..1.5)),
                1 => (rng.random_range(0.2..1.5), 0.0),
                _ => (rng.random_range(0.2..1.5), rng.random_range(0.2..1.5)),
            };
            p = Point::new(p.u + du, p.y + dy);
            pts.push(p);
        }
        if let Ok(r) = MonotoneRelation::canonicalize(&pts, random_tail(rng), random_tail(rng)) {
            return r;
        }
    }
}

/// Random strictly increasing piecewise-linear function with every slope in
/// `slopes`.
pub fn random_strict_relation(rng: &mut ChaCha8Rng, slopes: (f64, f64)) -> MonotoneRelation {
    let k = rng.random_range(1..=3);
    let mut p = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut pts = vec![p];
    for _ in 1..k {
        let du = rng.random_range(0.3..1.5);
        p = Point::new(p.u + du, p.y + du * rng.random_range(slopes.0..slopes.1));
        pts.push(p);
    }
    let left = Tail::Slope(rng.random_range(slopes.0..slopes.1));
    let right = Tail::Slope(rng.random_range(slopes.0..slopes.1));
    MonotoneRelation::canonicalize(&pts, left, right).expect("strictly increasing data")
}

pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    edges.push(if rng.random_bool(0.5) { (a, b) } else { (b, a) });
                }
            }
        }
        let g = Graph::new(n, &edges).expect("simple graph");
        if g.is_connected() {
            return g;
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                cur.push(c);
                rec(cur, used, out);
                cur.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Brute-force automorphism test of a single permutation.
pub fn is_automorphism(g: &Graph, psi: &[usize], vcol: &[usize], ecol: &[usize], orient: bool) -> bool {
    let n = g.vertex_count();
    if (0..n).any(|i| vcol[i] != vcol[psi[i]]) {
        return false;
    }
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            match (g.edge_between(a, b), g.edge_between(psi[a], psi[b])) {
                (None, None) => {}
                (Some(e), Some(f)) => {
                    if ecol[e] != ecol[f] {
                        return false;
                    }
                    if orient && (g.edges()[e].head == a) != (g.edges()[f].head == psi[a]) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

pub fn brute_force_automorphisms(g: &Graph, vcol: &[usize], ecol: &[usize], orient: bool) -> Vec<Vec<usize>> {
    permutations(g.vertex_count())
        .into_iter()
        .filter(|p| is_automorphism(g, p, vcol, ecol, orient))
        .collect()
}

/// Minimizes `f` over the lattice `pitch * Z^n` by successive refinement:
/// a coarse sweep of `[-half_width, half_width]^n` at `1000 * pitch`, then
/// sweeps of 15 points either side of the incumbent at `100 * pitch`,
/// `10 * pitch` and `pitch`. Suited to convex `f`.
pub fn grid_minimize(f: &dyn Fn(&[f64]) -> f64, n: usize, half_width: f64, pitch: f64) -> Vec<f64> {
    let radius = 15i64;
    let mut scale = 1000.0;
    let span = (half_width / (scale * pitch)).ceil() as i64;
    let mut best = sweep(f, n, &vec![0; n], span, scale, pitch);
    while scale > 1.0 {
        let centre: Vec<i64> = best.iter().map(|&k| k * 10).collect();
        scale /= 10.0;
        best = sweep(f, n, &centre, radius, scale, pitch);
    }
    best.iter().map(|&k| k as f64 * pitch).collect()
}

fn sweep(f: &dyn Fn(&[f64]) -> f64, n: usize, centre: &[i64], radius: i64, scale: f64, pitch: f64) -> Vec<i64> {
    let width = (2 * radius + 1) as usize;
    let total = width.pow(n as u32);
    let mut best = (f64::INFINITY, centre.to_vec());
    let mut idx = vec![0i64; n];
    let mut y = vec![0.0; n];
    for mut code in 0..total {
        for j in 0..n {
            idx[j] = centre[j] + (code % width) as i64 - radius;
            code /= width;
            y[j] = idx[j] as f64 * scale * pitch;
        }
        let v = f(&y);
        if v < best.0 {
            best = (v, idx.clone());
        }
    }
    // indices are in units of scale * pitch
    best.1
}

/// Drives a model with a constant input and returns the final output.
pub fn settle(model: &DynamicModel, v: f64, duration: f64, dt: f64) -> f64 {
    let mut x = 0.0;
    let steps = (duration / dt).round() as usize;
    for _ in 0..steps {
        if model.state_dim() == 0 {
            break;
        }
        let k1 = model.drift(x, v);
        let k2 = model.drift(x + 0.5 * dt * k1, v);
        let k3 = model.drift(x + 0.5 * dt * k2, v);
        let k4 = model.drift(x + dt * k3, v);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    model.output(x, v)
}

/// Network with relation-only elements.
pub fn relation_network(
    g: Graph,
    agents: &[MonotoneRelation],
    controllers: &[MonotoneRelation],
    w: Vec<f64>,
    assumption: Assumption,
) -> Network {
    Network::new(
        g,
        agents.iter().map(Element::from_relation).collect(),
        controllers.iter().map(Element::from_relation).collect(),
        w,
        assumption,
    )
    .expect("valid network")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
