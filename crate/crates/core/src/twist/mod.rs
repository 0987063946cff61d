//! Natural bases `|a;q⟩`, the twist matrices `F = Σ_a |a;q′⟩⟨a;q|` built
//! from them, and their composition.
//!
//! A natural basis at generic `q` is obtained by splitting each weight
//! sector of `V ⊗ V` into eigenvectors of `Q̄`. Where that refinement is not
//! complete (the zero-weight sector of B, C and D) and at the limit points
//! `q ∈ {0, 1}`, the closed forms in [`closed`] are used instead. Every
//! spectral vector is validated against its closed form.

mod closed;
mod qnumber;
mod spectral;

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DVector;

use crate::algebra::{HalfInt, SeriesSpec, Weight, WeightTable};
use crate::error::{Error, Result};
use crate::linops::{self, DenseMatrix, LegShape};
use crate::rmatrices::{self, QKind, QParam};

pub use closed::{bcd_closed_basis, closed_basis, crystal_basis, su_closed_basis};
pub use qnumber::{qnumber, qnumber_ratio};
pub use spectral::{block_eigenvectors, spectral_basis};

/// Minimal overlap accepted when fixing a sign by continuity.
pub const SIGN_THRESHOLD: f64 = 1e-6;

/// Closed forms replace the spectral path for `|ln q|` below this.
pub const NEAR_ONE: f64 = 1e-3;

/// Symbolic names of the closed-form basis vectors. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosedTag {
    Diagonal { i: usize },
    SymPair { i: usize, j: usize },
    AntiPair { i: usize, j: usize },
    NPlus { k: HalfInt },
    NMinus { k: HalfInt },
    Trace,
}

impl ClosedTag {
    /// 0 for the symmetric sector, 1 antisymmetric, 2 trace; this is the
    /// descending order of the `Q` exponents for every series.
    fn sector(&self) -> u8 {
        match self {
            ClosedTag::Diagonal { .. } | ClosedTag::SymPair { .. } | ClosedTag::NPlus { .. } => 0,
            ClosedTag::AntiPair { .. } | ClosedTag::NMinus { .. } => 1,
            ClosedTag::Trace => 2,
        }
    }
}

impl fmt::Display for ClosedTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedTag::Diagonal { i } => write!(f, "{i}{i}"),
            ClosedTag::SymPair { i, j } => write!(f, "{i}{j}+"),
            ClosedTag::AntiPair { i, j } => write!(f, "{i}{j}-"),
            ClosedTag::NPlus { k } => write!(f, "n+({k})"),
            ClosedTag::NMinus { k } => write!(f, "n-({k})"),
            ClosedTag::Trace => write!(f, "nTr"),
        }
    }
}

/// Either a closed-form tag or the quantized joint exponents
/// (`round(ℓ·10⁶)`) of a spectrally refined vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelKey {
    Closed(ClosedTag),
    Exponents(Vec<i64>),
}

pub fn quantize_exponent(l: f64) -> i64 {
    (l * 1e6).round() as i64
}

impl fmt::Display for LabelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKey::Closed(t) => write!(f, "{t}"),
            LabelKey::Exponents(e) => {
                let parts: Vec<String> = e.iter().map(|x| format!("{}", *x as f64 / 1e6)).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

/// The label `a` of a basis vector `|a;q⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub weight: Weight,
    pub key: LabelKey,
    /// Lowest product-basis index involved; orders otherwise equal labels.
    pub tiebreak: usize,
}

impl Ord for BasisLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .0
            .cmp(&self.weight.0)
            .then_with(|| match (&self.key, &other.key) {
                (LabelKey::Closed(a), LabelKey::Closed(b)) => a.sector().cmp(&b.sector()),
                (LabelKey::Exponents(a), LabelKey::Exponents(b)) => b.cmp(a),
                (LabelKey::Closed(_), LabelKey::Exponents(_)) => Ordering::Less,
                (LabelKey::Exponents(_), LabelKey::Closed(_)) => Ordering::Greater,
            })
            .then_with(|| self.tiebreak.cmp(&other.tiebreak))
            .then_with(|| match (&self.key, &other.key) {
                (LabelKey::Closed(a), LabelKey::Closed(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for BasisLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.weight, self.key)
    }
}

/// An orthonormal basis with one label per vector, sorted by label.
#[derive(Clone, Debug)]
pub struct LabeledBasis {
    pub spec: SeriesSpec,
    pub q: QParam,
    pub dim: usize,
    pub labels: Vec<BasisLabel>,
    pub vectors: Vec<DVector<f64>>,
}

impl LabeledBasis {
    /// Sorts the entries and checks uniqueness and completeness.
    pub fn new(
        spec: SeriesSpec,
        q: QParam,
        dim: usize,
        mut entries: Vec<(BasisLabel, DVector<f64>)>,
    ) -> Result<Self> {
        if entries.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: entries.len(),
            });
        }
        if let Some((_, v)) = entries.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InternalConsistency("duplicate basis label".into()));
        }
        let (labels, vectors) = entries.into_iter().unzip();
        Ok(LabeledBasis {
            spec,
            q,
            dim,
            labels,
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn position(&self, label: &BasisLabel) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn vector(&self, label: &BasisLabel) -> Option<&DVector<f64>> {
        self.position(label).map(|p| &self.vectors[p])
    }

    pub fn find_tag(&self, tag: &ClosedTag) -> Option<(&BasisLabel, &DVector<f64>)> {
        self.labels
            .iter()
            .zip(&self.vectors)
            .find(|(l, _)| l.key == LabelKey::Closed(tag.clone()))
    }

    /// Vectors as the columns of a matrix, in label order.
    pub fn matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.len());
        for (c, v) in self.vectors.iter().enumerate() {
            m.set_column(c, v);
        }
        m
    }

    pub fn gram_defect(&self) -> f64 {
        linops::orthogonality_defect(&self.matrix())
    }
}

/// Indices of the product basis sharing one total weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightBlock {
    pub weight: Weight,
    pub indices: Vec<usize>,
}

/// Partitions the product basis of `legs` copies of the defining
/// representation by total weight, in descending weight order.
pub fn weight_partition(spec: &SeriesSpec, legs: &LegShape) -> Result<Vec<WeightBlock>> {
    let n = spec.n();
    if legs.dims().iter().any(|&d| d != n) {
        return Err(Error::InvalidLegShape {
            dims: legs.dims().to_vec(),
            dim: n,
        });
    }
    let table = WeightTable::new(spec);
    let mut blocks: Vec<WeightBlock> = Vec::new();
    for idx in 0..legs.total() {
        let w = table.total(&legs.split(idx));
        match blocks.iter_mut().find(|b| b.weight == w) {
            Some(b) => b.indices.push(idx),
            None => blocks.push(WeightBlock {
                weight: w,
                indices: vec![idx],
            }),
        }
    }
    blocks.sort_by(|a, b| b.weight.0.cmp(&a.weight.0));
    Ok(blocks)
}

/// A twist matrix `F^{[q_to q_from]} = Σ_a |a;q_to⟩⟨a;q_from|`.
#[derive(Clone, Debug)]
pub struct FMatrix {
    pub spec: SeriesSpec,
    pub q_from: QParam,
    pub q_to: QParam,
    pub matrix: DenseMatrix,
    pub label_order: Vec<BasisLabel>,
}

impl FMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The reverse twist `F^{[q_from q_to]} = Fᵀ`.
    pub fn inverse(&self) -> FMatrix {
        FMatrix {
            spec: self.spec,
            q_from: self.q_to,
            q_to: self.q_from,
            matrix: self.matrix.transpose(),
            label_order: self.label_order.clone(),
        }
    }
}

pub fn assemble_f(to: &LabeledBasis, from: &LabeledBasis) -> Result<FMatrix> {
    if to.spec != from.spec || to.dim != from.dim || to.labels != from.labels {
        return Err(Error::LabelMismatch);
    }
    let matrix = to.matrix() * from.matrix().transpose();
    Ok(FMatrix {
        spec: to.spec,
        q_from: from.q,
        q_to: to.q,
        matrix,
        label_order: to.labels.clone(),
    })
}

/// `F^{[q″q]} = F^{[q″q′]} F^{[q′q]}`.
pub fn compose(f2: &FMatrix, f1: &FMatrix) -> Result<FMatrix> {
    if f2.spec != f1.spec {
        return Err(Error::ChainMismatch(format!("{} after {}", f2.spec, f1.spec)));
    }
    if f2.q_from.value() != f1.q_to.value() {
        return Err(Error::ChainMismatch(format!(
            "outer twist starts at q = {} but inner ends at q = {}",
            f2.q_from, f1.q_to
        )));
    }
    if f2.label_order != f1.label_order {
        return Err(Error::ChainMismatch("label orders differ".into()));
    }
    Ok(FMatrix {
        spec: f1.spec,
        q_from: f1.q_from,
        q_to: f2.q_to,
        matrix: &f2.matrix * &f1.matrix,
        label_order: f1.label_order.clone(),
    })
}

/// Whether the zero-weight pair sector needs the closed forms at generic q.
fn zero_sector_is_closed(spec: &SeriesSpec, block: &WeightBlock) -> bool {
    spec.is_orthosymplectic() && block.weight.is_zero()
}

/// The natural basis `|a;q⟩` of `V ⊗ V`.
pub fn natural_basis(spec: &SeriesSpec, q: QParam) -> Result<LabeledBasis> {
    let h = match q.kind() {
        QKind::Zero | QKind::One => return closed_basis(spec, q),
        QKind::Generic => q.h().expect("positive q"),
    };
    if h.abs() < NEAR_ONE {
        return closed_basis(spec, q);
    }
    let closed = closed_basis(spec, q)?;
    let reference = closed_basis(spec, QParam::ONE)?;
    let qb = rmatrices::qbar(spec, q)?;
    let n = spec.n();
    let mut entries = Vec::with_capacity(n * n);
    for block in weight_partition(spec, &LegShape::uniform(n, 2))? {
        let candidates: Vec<usize> = (0..closed.len())
            .filter(|&p| closed.labels[p].weight == block.weight)
            .collect();
        if zero_sector_is_closed(spec, &block) {
            entries.extend(
                candidates
                    .iter()
                    .map(|&p| (closed.labels[p].clone(), closed.vectors[p].clone())),
            );
            continue;
        }
        let found = block_eigenvectors(std::slice::from_ref(&qb), &block, q)?;
        let mut used = vec![false; candidates.len()];
        for (_, v) in found {
            let (slot, _) = candidates
                .iter()
                .enumerate()
                .map(|(s, &p)| (s, closed.vectors[p].dot(&v).abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or(Error::LabelMismatch)?;
            if used[slot] {
                return Err(Error::InternalConsistency(format!(
                    "two spectral vectors match one closed form in sector {}",
                    block.weight
                )));
            }
            used[slot] = true;
            let label = closed.labels[candidates[slot]].clone();
            let anchor = reference.vector(&label).ok_or(Error::LabelMismatch)?;
            let overlap = anchor.dot(&v);
            if overlap.abs() < SIGN_THRESHOLD {
                return Err(Error::SignAmbiguity {
                    label: label.to_string(),
                    overlap,
                });
            }
            let v = if overlap < 0.0 { -v } else { v };
            let deviation = (&v - &closed.vectors[candidates[slot]]).amax();
            if deviation > 1e-9 {
                return Err(Error::InternalConsistency(format!(
                    "spectral vector {label} deviates from its closed form by {deviation:e}"
                )));
            }
            entries.push((label, v));
        }
    }
    LabeledBasis::new(*spec, q, n * n, entries)
}

/// `F^{[q_to q_from]}` on `V ⊗ V`.
pub fn f_interval(spec: &SeriesSpec, q_to: QParam, q_from: QParam) -> Result<FMatrix> {
    let to = natural_basis(spec, q_to)?;
    if q_from == q_to {
        let dim = to.dim;
        return Ok(FMatrix {
            spec: *spec,
            q_from,
            q_to,
            matrix: DenseMatrix::identity(dim, dim),
            label_order: to.labels,
        });
    }
    assemble_f(&to, &natural_basis(spec, q_from)?)
}

/// Leg swap applied to both sides of an operator on `V ⊗ V`.
pub fn swap_f(f: &FMatrix) -> Result<DenseMatrix> {
    linops::swap_legs(&f.matrix, f.spec.n())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> SeriesSpec {
        s.parse().unwrap()
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn partition_examples() {
        let a1 = weight_partition(&spec("A1"), &LegShape::uniform(2, 2)).unwrap();
        let sizes: Vec<(String, Vec<usize>)> = a1.iter().map(|b| (b.weight.to_string(), b.indices.clone())).collect();
        assert_eq!(
            sizes,
            vec![
                ("(2)".to_string(), vec![0]),
                ("(0)".to_string(), vec![1, 2]),
                ("(-2)".to_string(), vec![3])
            ]
        );
        let b1 = weight_partition(&spec("B1"), &LegShape::uniform(3, 2)).unwrap();
        let zero = b1.iter().find(|b| b.weight.is_zero()).unwrap();
        assert_eq!(zero.indices, vec![2, 4, 6]);
        let a1t = weight_partition(&spec("A1"), &LegShape::uniform(2, 3)).unwrap();
        let one = a1t.iter().find(|b| b.weight.0 == vec![HalfInt::from_int(1)]).unwrap();
        assert_eq!(one.indices.len(), 3);
        assert!(weight_partition(&spec("A1"), &LegShape::uniform(3, 2)).is_err());
    }

    #[test]
    fn identity_when_endpoints_agree() {
        for qv in [0.0, 1.0, 2.5] {
            let f = f_interval(&spec("B2"), q(qv), q(qv)).unwrap();
            let id = DenseMatrix::identity(f.dim(), f.dim());
            assert!(linops::residual(&f.matrix, &id).unwrap() < 1e-12);
        }
    }

    #[test]
    fn eq21_entries() {
        for qv in [0.1, 0.5, 2.0, 10.0] {
            let f = f_interval(&spec("A1"), q(qv), QParam::ONE).unwrap();
            let d = (2.0 * (qv + 1.0 / qv)).sqrt();
            let p = (qv.sqrt() + 1.0 / qv.sqrt()) / d;
            let m = (qv.sqrt() - 1.0 / qv.sqrt()) / d;
            let expect = DenseMatrix::from_row_slice(
                4,
                4,
                &[1.0, 0.0, 0.0, 0.0, 0.0, p, m, 0.0, 0.0, -m, p, 0.0, 0.0, 0.0, 0.0, 1.0],
            );
            assert!(linops::residual(&f.matrix, &expect).unwrap() < 1e-12, "q={qv}");
        }
    }

    #[test]
    fn crystal_to_one_middle_block() {
        let f = f_interval(&spec("A1"), QParam::ZERO, QParam::ONE).unwrap();
        let s = 0.5f64.sqrt();
        let block = [f.matrix[(1, 1)], f.matrix[(1, 2)], f.matrix[(2, 1)], f.matrix[(2, 2)]];
        for (a, b) in block.iter().zip([s, -s, s, s]) {
            assert!((a - b).abs() < 1e-15, "{block:?}");
        }
    }

    #[test]
    fn compose_checks_chain() {
        let sp = spec("A1");
        let f1 = f_interval(&sp, q(2.0), QParam::ONE).unwrap();
        let f2 = f_interval(&sp, q(3.0), q(2.0)).unwrap();
        let c = compose(&f2, &f1).unwrap();
        let direct = f_interval(&sp, q(3.0), QParam::ONE).unwrap();
        assert!(linops::residual(&c.matrix, &direct.matrix).unwrap() < 1e-12);
        assert!(matches!(compose(&f1, &f2), Err(Error::ChainMismatch(_))));
        let other = f_interval(&spec("A2"), q(2.0), QParam::ONE).unwrap();
        assert!(matches!(compose(&f2, &other), Err(Error::ChainMismatch(_))));
    }

    #[test]
    fn assemble_rejects_label_mismatch() {
        let a = natural_basis(&spec("A1"), q(2.0)).unwrap();
        let b = natural_basis(&spec("C1"), q(2.0)).unwrap();
        assert_eq!(assemble_f(&a, &b).unwrap_err(), Error::LabelMismatch);
    }

    #[test]
    fn label_order_is_weight_then_sector() {
        let b = natural_basis(&spec("A1"), QParam::ONE).unwrap();
        let names: Vec<String> = b.labels.iter().map(|l| l.to_string()).collect();
        assert_eq!(names, vec!["(2):11", "(0):12+", "(0):12-", "(-2):22"]);
    }
}
