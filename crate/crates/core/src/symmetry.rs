//! Graph automorphisms, weak automorphisms of a network, and the cluster
//! partition they induce.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::network::{permutation_triple, Element, Graph, Network, VertexPermutation};
use crate::steadystate::{solve, SolveError, SolverOptions};

/// Largest vertex count accepted by the automorphism search.
pub const MAX_VERTICES: usize = 16;
/// Largest automorphism group stored explicitly.
pub const MAX_GROUP_ORDER: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("graph has {0} vertices; automorphism enumeration is limited to {MAX_VERTICES}")]
    TooLarge(usize),
    #[error("automorphism group exceeds {MAX_GROUP_ORDER} elements")]
    GroupTooLarge,
    #[error("{what} colors: expected {expected}, got {got}")]
    ColorLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// An explicitly stored set of automorphisms, sorted lexicographically by
/// image array.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismSet {
    perms: Vec<VertexPermutation>,
}

impl AutomorphismSet {
    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VertexPermutation> {
        self.perms.iter()
    }

    pub fn images(&self) -> Vec<Vec<usize>> {
        self.perms.iter().map(|p| p.image().to_vec()).collect()
    }

    pub fn contains(&self, image: &[usize]) -> bool {
        self.perms.binary_search_by(|p| p.image().cmp(image)).is_ok()
    }

    /// Identity present, closed under composition and inverses.
    pub fn is_group(&self) -> bool {
        let Some(first) = self.perms.first() else {
            return false;
        };
        let n = first.image().len();
        let identity: Vec<usize> = (0..n).collect();
        if !self.contains(&identity) {
            return false;
        }
        let set: HashSet<&[usize]> = self.perms.iter().map(|p| p.image()).collect();
        for a in &self.perms {
            let mut inv = vec![0; n];
            for (i, &j) in a.image().iter().enumerate() {
                inv[j] = i;
            }
            if !set.contains(inv.as_slice()) {
                return false;
            }
            for b in &self.perms {
                let comp: Vec<usize> = b.image().iter().map(|&j| a.image()[j]).collect();
                if !set.contains(comp.as_slice()) {
                    return false;
                }
            }
        }
        true
    }

    /// Orbits of the vertices, each sorted, ordered by smallest member.
    pub fn orbits(&self, n: usize) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for p in &self.perms {
            for (i, &j) in p.image().iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let k = *index.entry(r).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[k].push(v);
        }
        blocks
    }
}

impl<'a> IntoIterator for &'a AutomorphismSet {
    type Item = &'a VertexPermutation;
    type IntoIter = std::slice::Iter<'a, VertexPermutation>;
    fn into_iter(self) -> Self::IntoIter {
        self.perms.iter()
    }
}

/// Color- and (optionally) orientation-preserving automorphisms of `g`.
pub fn graph_automorphisms(
    g: &Graph,
    vertex_colors: &[usize],
    edge_colors: &[usize],
    respect_orientation: bool,
) -> Result<AutomorphismSet, SymmetryError> {
    let n = g.vertex_count();
    if n > MAX_VERTICES {
        return Err(SymmetryError::TooLarge(n));
    }
    for (what, expected, got) in [
        ("vertex", n, vertex_colors.len()),
        ("edge", g.edge_count(), edge_colors.len()),
    ] {
        if expected != got {
            return Err(SymmetryError::ColorLength { what, expected, got });
        }
    }
    if n == 0 {
        return Ok(AutomorphismSet { perms: Vec::new() });
    }
    let search = Search {
        g,
        vertex_colors,
        edge_colors,
        respect_orientation,
    };
    let branches: Vec<Result<Vec<Vec<usize>>, SymmetryError>> = (0..n)
        .into_par_iter()
        .filter(|&c| search.compatible(&[], 0, c))
        .map(|c| {
            let mut image = vec![c];
            let mut used = vec![false; n];
            used[c] = true;
            let mut out = Vec::new();
            search.extend(&mut image, &mut used, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut perms = Vec::new();
    for branch in branches {
        for image in branch? {
            if perms.len() >= MAX_GROUP_ORDER {
                return Err(SymmetryError::GroupTooLarge);
            }
            perms.push(permutation_triple(&image, g).expect("search yields automorphisms"));
        }
    }
    Ok(AutomorphismSet { perms })
}

struct Search<'a> {
    g: &'a Graph,
    vertex_colors: &'a [usize],
    edge_colors: &'a [usize],
    respect_orientation: bool,
}

impl Search<'_> {
    /// Can vertex `v` map to `c`, given the images of `0..v`?
    fn compatible(&self, image: &[usize], v: usize, c: usize) -> bool {
        let g = self.g;
        if self.vertex_colors[v] != self.vertex_colors[c] || g.degree(v) != g.degree(c) {
            return false;
        }
        for (u, &cu) in image.iter().enumerate() {
            match (g.edge_between(u, v), g.edge_between(cu, c)) {
                (None, None) => {}
                (Some(e), Some(f)) => {
                    if self.edge_colors[e] != self.edge_colors[f] {
                        return false;
                    }
                    if self.respect_orientation && (g.edges()[e].head == v) != (g.edges()[f].head == c) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    fn extend(
        &self,
        image: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), SymmetryError> {
        let v = image.len();
        if v == used.len() {
            if out.len() >= MAX_GROUP_ORDER {
                return Err(SymmetryError::GroupTooLarge);
            }
            out.push(image.clone());
            return Ok(());
        }
        for c in 0..used.len() {
            if used[c] || !self.compatible(image, v, c) {
                continue;
            }
            used[c] = true;
            image.push(c);
            self.extend(image, used, out)?;
            image.pop();
            used[c] = false;
        }
        Ok(())
    }
}

/// Class index per element: user labels when present, otherwise weak
/// equivalence of the steady-state relations. `offsets` are constant inputs
/// added to each element's input; elements with different offsets are only
/// equivalent when their shifted relations are.
fn element_classes(elements: &[Element], offsets: &[f64]) -> Vec<usize> {
    if elements.iter().all(|e| e.class.is_some()) && !elements.is_empty() {
        let mut labels: HashMap<(&str, u64), usize> = HashMap::new();
        return elements
            .iter()
            .zip(offsets)
            .map(|(e, d)| {
                let next = labels.len();
                let key = (e.class.as_deref().expect("checked"), (d + 0.0).to_bits());
                *labels.entry(key).or_insert(next)
            })
            .collect();
    }
    let shifted: Vec<_> = elements
        .iter()
        .zip(offsets)
        .map(|(e, &d)| e.relation.with_input_offset(d))
        .collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut classes = Vec::with_capacity(elements.len());
    for (i, r) in shifted.iter().enumerate() {
        match reps.iter().position(|&k| shifted[k].weakly_equivalent(r)) {
            Some(k) => classes.push(k),
            None => {
                classes.push(reps.len());
                reps.push(i);
            }
        }
    }
    classes
}

/// Agent classes, taking each agent together with its exogenous input.
pub fn agent_classes(net: &Network) -> Vec<usize> {
    element_classes(net.agents(), net.exogenous())
}

pub fn controller_classes(net: &Network) -> Vec<usize> {
    element_classes(net.controllers(), &vec![0.0; net.edge_count()])
}

/// True when all agents are weakly equivalent and so are all controllers.
pub fn is_weakly_homogeneous(net: &Network) -> bool {
    agent_classes(net).iter().all(|&c| c == 0) && controller_classes(net).iter().all(|&c| c == 0)
}

/// Graph automorphisms mapping agents to weakly equivalent agents and
/// controllers to weakly equivalent controllers; orientation must be kept
/// unless every controller relation is odd.
pub fn weak_automorphisms(net: &Network) -> Result<AutomorphismSet, SymmetryError> {
    graph_automorphisms(
        net.graph(),
        &agent_classes(net),
        &controller_classes(net),
        !net.controllers_odd(),
    )
}

/// Vertex blocks (zero-based indices) with optional per-block values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub values: Option<Vec<f64>>,
}

impl Partition {
    pub fn block_of(&self, v: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&v))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Blocks expressed with the network's vertex ids.
    pub fn ids(&self, net: &Network) -> Vec<Vec<u32>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| net.vertex_ids()[i]).collect())
            .collect()
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks.iter().all(|b| {
            let k = coarser.block_of(b[0]);
            k.is_some() && b.iter().all(|&v| coarser.block_of(v) == k)
        })
    }
}

/// Orbits of the weak automorphism group, i.e. the cliques of the
/// exchangeability graph.
pub fn exchangeability_partition(net: &Network) -> Result<Partition, SymmetryError> {
    let group = weak_automorphisms(net)?;
    Ok(Partition {
        blocks: group.orbits(net.vertex_count()),
        values: None,
    })
}

/// Predicted clusters with their steady-state values.
///
/// A weakly homogeneous network with odd controllers is reported as a single
/// consensus block.
pub fn predict_clusters(net: &Network, opts: &SolverOptions) -> Result<Partition, SymmetryError> {
    let blocks = if net.controllers_odd() && is_weakly_homogeneous(net) {
        vec![(0..net.vertex_count()).collect()]
    } else {
        exchangeability_partition(net)?.blocks
    };
    let ss = solve(net, opts)?;
    let values = blocks
        .iter()
        .map(|b: &Vec<usize>| b.iter().map(|&i| ss.y[i]).sum::<f64>() / b.len() as f64)
        .collect();
    Ok(Partition {
        blocks,
        values: Some(values),
    })
}
