use nalgebra::DMatrix;

use super::{Graph, NetworkError};

/// A graph automorphism `psi` together with its induced edge map and the
/// orientation signs, so that `P E = E Q D`.
///
/// * `(P y)_i = y_{psi(i)}`.
/// * `edge_image[f]` is the edge joining `psi(head f)` and `psi(tail f)`;
///   `Q` has a one at `(f, edge_image[f])`.
/// * `signs[e]` is `+1` when the edge mapped onto `e` keeps its orientation,
///   `-1` when it is reversed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexPermutation {
    image: Vec<usize>,
    edge_image: Vec<usize>,
    signs: Vec<i8>,
}

impl VertexPermutation {
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn edge_image(&self) -> &[usize] {
        &self.edge_image
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn preserves_orientation(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn p_matrix(&self) -> DMatrix<f64> {
        let n = self.image.len();
        DMatrix::from_fn(n, n, |i, k| if self.image[i] == k { 1.0 } else { 0.0 })
    }

    pub fn q_matrix(&self) -> DMatrix<f64> {
        let m = self.edge_image.len();
        DMatrix::from_fn(m, m, |f, e| if self.edge_image[f] == e { 1.0 } else { 0.0 })
    }

    pub fn d_matrix(&self) -> DMatrix<f64> {
        let m = self.signs.len();
        DMatrix::from_fn(m, m, |e, f| if e == f { self.signs[e] as f64 } else { 0.0 })
    }

    /// Checks `P E = E Q D` entrywise.
    pub fn satisfies_intertwining(&self, g: &Graph) -> bool {
        let e = g.incidence();
        let lhs = self.p_matrix() * e.matrix();
        let rhs = e.matrix() * self.q_matrix() * self.d_matrix();
        lhs == rhs
    }
}

/// Builds the permutation triple of `psi`, given as an image array.
pub fn permutation_triple(psi: &[usize], g: &Graph) -> Result<VertexPermutation, NetworkError> {
    let n = g.vertex_count();
    if psi.len() != n {
        return Err(NetworkError::DimensionMismatch {
            expected: n,
            got: psi.len(),
        });
    }
    let mut hit = vec![false; n];
    for &j in psi {
        if j >= n || hit[j] {
            return Err(NetworkError::NotAnAutomorphism);
        }
        hit[j] = true;
    }
    let m = g.edge_count();
    let mut edge_image = vec![0; m];
    let mut signs = vec![0i8; m];
    for (f, edge) in g.edges().iter().enumerate() {
        let (a, b) = (psi[edge.head], psi[edge.tail]);
        let e = g.edge_between(a, b).ok_or(NetworkError::NotAnAutomorphism)?;
        edge_image[f] = e;
        signs[e] = if g.edges()[e].head == a { 1 } else { -1 };
    }
    // an injective edge map on a finite set is a bijection, so adjacency is
    // preserved in both directions
    Ok(VertexPermutation {
        image: psi.to_vec(),
        edge_image,
        signs,
    })
}

/// `(P y)_i = y_{psi(i)}`.
pub fn apply_output_permutation(p: &VertexPermutation, y: &[f64]) -> Result<Vec<f64>, NetworkError> {
    if y.len() != p.image.len() {
        return Err(NetworkError::DimensionMismatch {
            expected: p.image.len(),
            got: y.len(),
        });
    }
    Ok(p.image.iter().map(|&j| y[j]).collect())
}
