//! Dense real linear algebra on tensor products of small representation
//! spaces.
//!
//! Composite indices are row-major: the product vector `e_i ⊗ e_k` of
//! `V ⊗ W` sits at `i·dim(W) + k`, the same convention as [`kron`].

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Square dense matrix. Rows carry the composite upper index, columns the
/// composite lower index.
pub type DenseMatrix = DMatrix<f64>;

/// Default relative clustering threshold for [`sym_eigencluster`].
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Builds a square matrix from row-major data, rejecting NaN and infinities.
pub fn dense_from_row_major(dim: usize, data: &[f64]) -> Result<DenseMatrix> {
    if data.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: data.len(),
        });
    }
    let m = DenseMatrix::from_row_slice(dim, dim, data);
    check_finite(&m)?;
    Ok(m)
}

pub fn check_finite(m: &DenseMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Kronecker product; `(i, k)` maps to `i·dim(b) + k`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

/// Max-abs entrywise difference.
pub fn residual(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs())))
}

pub fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `‖mᵀm − I‖∞` (max-abs).
pub fn orthogonality_defect(m: &DenseMatrix) -> f64 {
    let g = m.transpose() * m;
    let id = DenseMatrix::identity(m.ncols(), m.ncols());
    residual(&g, &id).expect("square")
}

/// `‖ab − ba‖∞`.
pub fn commutator_residual(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

/// Dimensions of the tensor legs making up a composite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegShape {
    dims: Vec<usize>,
}

impl LegShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidLegShape { dims, dim: 0 });
        }
        Ok(LegShape { dims })
    }

    /// `legs` copies of an `n`-dimensional space.
    pub fn uniform(n: usize, legs: usize) -> Self {
        LegShape::new(vec![n; legs]).expect("positive dims")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn legs(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Splits a composite index into per-leg indices.
    pub fn split(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn join(&self, parts: &[usize]) -> usize {
        parts
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (p, d)| acc * d + p)
    }

    fn check(&self, m: &DenseMatrix) -> Result<()> {
        if !m.is_square() || m.nrows() != self.total() {
            return Err(Error::InvalidLegShape {
                dims: self.dims.clone(),
                dim: m.nrows(),
            });
        }
        Ok(())
    }
}

fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= len || seen[p] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Conjugates `m` by the operator reordering tensor legs: output leg `k`
/// carries input leg `perm[k]`. For two legs and `perm = [1, 0]` this sends
/// `kron(a, b)` to `kron(b, a)`.
///
/// Composition: permuting by `p1` and then by `p2` equals permuting once by
/// `k ↦ p1[p2[k]]`.
pub fn leg_permute(m: &DenseMatrix, shape: &LegShape, perm: &[usize]) -> Result<DenseMatrix> {
    shape.check(m)?;
    check_permutation(perm, shape.legs())?;
    let out_shape = LegShape::new(perm.iter().map(|&p| shape.dims[p]).collect())?;
    let dim = shape.total();
    // image[x] = composite index of the permuted product vector
    let image: Vec<usize> = (0..dim)
        .map(|x| {
            let parts = shape.split(x);
            let moved: Vec<usize> = perm.iter().map(|&p| parts[p]).collect();
            out_shape.join(&moved)
        })
        .collect();
    let mut out = DenseMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(image[r], image[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Two-leg swap on `V ⊗ V`.
pub fn swap_legs(m: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    leg_permute(m, &LegShape::uniform(n, 2), &[1, 0])
}

/// Places the operator `m` (acting on `positions.len()` copies of an
/// `n`-dimensional space) on the given legs of `V^{⊗legs}`, identity
/// elsewhere. The first factor of `m` acts on leg `positions[0]`, etc.
pub fn embed(m: &DenseMatrix, n: usize, legs: usize, positions: &[usize]) -> Result<DenseMatrix> {
    let k = positions.len();
    let local = LegShape::uniform(n, k);
    local.check(m)?;
    let mut seen = vec![false; legs];
    for &p in positions {
        if p >= legs || seen[p] {
            return Err(Error::InvalidPermutation(positions.to_vec()));
        }
        seen[p] = true;
    }
    let shape = LegShape::uniform(n, legs);
    let dim = shape.total();
    let mut out = DenseMatrix::zeros(dim, dim);
    for r in 0..dim {
        let rp = shape.split(r);
        let rl: Vec<usize> = positions.iter().map(|&p| rp[p]).collect();
        let row_local = local.join(&rl);
        for c in 0..dim {
            let cp = shape.split(c);
            let spectator_match = (0..legs).all(|l| seen[l] || rp[l] == cp[l]);
            if !spectator_match {
                continue;
            }
            let cl: Vec<usize> = positions.iter().map(|&p| cp[p]).collect();
            out[(r, c)] = m[(row_local, local.join(&cl))];
        }
    }
    Ok(out)
}

/// One eigenvalue cluster of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct EigenCluster {
    /// Mean of the clustered eigenvalues.
    pub value: f64,
    /// Orthonormal columns spanning the eigenspace.
    pub vectors: DMatrix<f64>,
}

impl EigenCluster {
    pub fn multiplicity(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn projector(&self) -> DenseMatrix {
        &self.vectors * self.vectors.transpose()
    }
}

/// Symmetric eigendecomposition with eigenvalues merged when closer than
/// `rel_tol · spread`. Clusters come out in descending eigenvalue order.
pub fn sym_eigencluster(m: &DenseMatrix, rel_tol: f64) -> Result<Vec<EigenCluster>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    check_finite(m)?;
    let dim = m.nrows();
    let scale = max_abs(m);
    let defect = residual(m, &m.transpose())?;
    if defect > rel_tol * scale {
        return Err(Error::NotSymmetric {
            defect,
            tolerance: rel_tol * scale,
        });
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    // descending eigenvalue, ties by original position
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let spread = values[0] - values[dim - 1];
    let top = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let threshold = (rel_tol * spread).max(64.0 * f64::EPSILON * top);

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=dim {
        if i == dim || values[i - 1] - values[i] > threshold {
            let members = &order[start..i];
            let mut vectors = DMatrix::zeros(dim, members.len());
            for (c, &src) in members.iter().enumerate() {
                vectors.set_column(c, &eig.eigenvectors.column(src));
            }
            let value = values[start..i].iter().sum::<f64>() / (i - start) as f64;
            clusters.push(EigenCluster { value, vectors });
            start = i;
        }
    }
    Ok(clusters)
}
