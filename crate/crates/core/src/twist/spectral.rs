//! Joint eigenbases of commuting symmetric operators, one weight block at a
//! time.

use nalgebra::DVector;

use super::{quantize_exponent, BasisLabel, LabelKey, LabeledBasis, WeightBlock, SIGN_THRESHOLD};
use crate::algebra::SeriesSpec;
use crate::error::{Error, Result};
use crate::linops::{self, DenseMatrix, DEFAULT_REL_TOL};
use crate::rmatrices::{QKind, QParam};

/// Exponent attached to an eigenvalue: `ln λ / ln q` at generic `q`, the
/// eigenvalue itself otherwise.
fn exponent_of(lambda: f64, q: QParam) -> Result<f64> {
    match q.kind() {
        QKind::Generic => {
            if lambda <= 0.0 {
                return Err(Error::SpectrumMismatch(format!(
                    "non-positive eigenvalue {lambda:e} at q = {q}"
                )));
            }
            Ok(lambda.ln() / q.h().expect("positive q"))
        }
        _ => Ok(lambda),
    }
}

fn check_block_diagonal(op: &DenseMatrix, blocks: &[WeightBlock]) -> Result<()> {
    let dim = op.nrows();
    let mut owner = vec![usize::MAX; dim];
    for (b, block) in blocks.iter().enumerate() {
        for &i in &block.indices {
            owner[i] = b;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::InternalConsistency("partition does not cover the space".into()));
    }
    let tol = 1e-10 * linops::max_abs(op);
    for r in 0..dim {
        for c in 0..dim {
            if owner[r] != owner[c] && op[(r, c)].abs() > tol {
                return Err(Error::InternalConsistency(format!(
                    "operator couples weight sectors {} and {}",
                    blocks[owner[r]].weight, blocks[owner[c]].weight
                )));
            }
        }
    }
    Ok(())
}

/// Joint eigenvectors of `ops` inside one weight block, each with its
/// exponents. Clusters are split operator by operator; any cluster left
/// with more than one dimension is reported as degenerate.
pub fn block_eigenvectors(
    ops: &[DenseMatrix],
    block: &WeightBlock,
    q: QParam,
) -> Result<Vec<(Vec<f64>, DVector<f64>)>> {
    let dim = ops.first().map(|o| o.nrows()).ok_or(Error::DimensionMismatch {
        expected: 1,
        found: 0,
    })?;
    let size = block.indices.len();
    let restricted: Vec<DenseMatrix> = ops
        .iter()
        .map(|op| {
            DenseMatrix::from_fn(size, size, |r, c| op[(block.indices[r], block.indices[c])])
        })
        .collect();

    // (orthonormal columns inside the block, exponents so far)
    let mut spaces: Vec<(DenseMatrix, Vec<f64>)> = vec![(DenseMatrix::identity(size, size), Vec::new())];
    for op in &restricted {
        let mut next = Vec::new();
        for (basis, exps) in spaces {
            let local = basis.transpose() * op * &basis;
            let local = (&local + local.transpose()) * 0.5;
            for cluster in linops::sym_eigencluster(&local, DEFAULT_REL_TOL)? {
                let mut e = exps.clone();
                e.push(exponent_of(cluster.value, q)?);
                next.push((&basis * &cluster.vectors, e));
            }
        }
        spaces = next;
    }

    let mut out = Vec::with_capacity(size);
    for (basis, exps) in spaces {
        if basis.ncols() != 1 {
            return Err(Error::DegenerateSector {
                weight: block.weight.clone(),
                eigenvalues: exps,
                dim: basis.ncols(),
            });
        }
        let mut v = DVector::zeros(dim);
        for (r, &i) in block.indices.iter().enumerate() {
            v[i] = basis[(r, 0)];
        }
        // exponents from Rayleigh quotients of the full operators
        let exps = ops
            .iter()
            .map(|op| exponent_of(v.dot(&(op * &v)), q))
            .collect::<Result<Vec<f64>>>()
            .unwrap_or(exps);
        out.push((exps, v));
    }
    Ok(out)
}

/// Largest component made positive, earliest index on ties.
fn canonical_sign(v: DVector<f64>) -> DVector<f64> {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        -v
    } else {
        v
    }
}

fn first_support(v: &DVector<f64>) -> usize {
    v.iter().position(|x| x.abs() > 1e-8).unwrap_or(0)
}

/// Eigen-residual of `v` against the exponents of a reference label.
fn label_distance(ops: &[DenseMatrix], v: &DVector<f64>, exps: &[i64], q: QParam) -> f64 {
    ops.iter()
        .zip(exps)
        .map(|(op, &e)| {
            let target = match q.kind() {
                QKind::Generic => q.pow(e as f64 / 1e6).unwrap_or(f64::NAN),
                _ => e as f64 / 1e6,
            };
            (op * v - v * target).amax() / linops::max_abs(op).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Jointly diagonalizes `ops` on every weight block.
///
/// Without a reference, labels are the quantized exponents and each vector's
/// largest component is positive. With a reference (whose labels must carry
/// exponent keys for the same operators), each vector takes the label of the
/// reference vector whose exponents it satisfies best and is signed to
/// overlap positively with it.
pub fn spectral_basis(
    spec: &SeriesSpec,
    ops: &[DenseMatrix],
    partition: &[WeightBlock],
    q: QParam,
    reference: Option<&LabeledBasis>,
) -> Result<LabeledBasis> {
    let dim = ops.first().map(|o| o.nrows()).ok_or(Error::DimensionMismatch {
        expected: 1,
        found: 0,
    })?;
    for (i, a) in ops.iter().enumerate() {
        check_block_diagonal(a, partition)?;
        for b in &ops[i + 1..] {
            let scale = linops::max_abs(a) * linops::max_abs(b) * dim as f64;
            let c = linops::commutator_residual(a, b);
            if c > 1e-10 * scale.max(1.0) {
                return Err(Error::InternalConsistency(format!(
                    "operators do not commute: residual {c:e}"
                )));
            }
        }
    }

    let mut entries = Vec::with_capacity(dim);
    for block in partition {
        let found = block_eigenvectors(ops, block, q)?;
        match reference {
            None => {
                for (exps, v) in found {
                    let v = canonical_sign(v);
                    entries.push((
                        BasisLabel {
                            weight: block.weight.clone(),
                            key: LabelKey::Exponents(exps.iter().map(|&e| quantize_exponent(e)).collect()),
                            tiebreak: first_support(&v),
                        },
                        v,
                    ));
                }
            }
            Some(refb) => {
                let candidates: Vec<usize> = (0..refb.len())
                    .filter(|&p| refb.labels[p].weight == block.weight)
                    .collect();
                if candidates.len() != found.len() {
                    return Err(Error::LabelMismatch);
                }
                let mut used = vec![false; candidates.len()];
                for (_, v) in found {
                    let mut best: Option<(usize, f64)> = None;
                    for (slot, &p) in candidates.iter().enumerate() {
                        let LabelKey::Exponents(e) = &refb.labels[p].key else {
                            return Err(Error::LabelMismatch);
                        };
                        let d = label_distance(ops, &v, e, q);
                        if best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((slot, d));
                        }
                    }
                    let (slot, _) = best.ok_or(Error::LabelMismatch)?;
                    if used[slot] {
                        return Err(Error::LabelMismatch);
                    }
                    used[slot] = true;
                    let p = candidates[slot];
                    let overlap = refb.vectors[p].dot(&v);
                    if overlap.abs() < SIGN_THRESHOLD {
                        return Err(Error::SignAmbiguity {
                            label: refb.labels[p].to_string(),
                            overlap,
                        });
                    }
                    let v = if overlap < 0.0 { -v } else { v };
                    entries.push((refb.labels[p].clone(), v));
                }
            }
        }
    }
    LabeledBasis::new(*spec, q, dim, entries)
}
