//! Triple tensor products `V ⊗ V ⊗ V`: the maps `G₂₃ = F₂₃(id⊗Δ)(F)` and
//! `G₁₂ = F₁₂(Δ⊗id)(F)`, the coassociator `Φ = G₂₃⁻¹G₁₂` and the
//! coboundary `dF^{[01]}`.
//!
//! `G₂₃` conjugates the classical pair of commuting operators
//! `(q^{τ₁₂+τ₁₃}, q^{τ₂₃})` into the deformed pair
//! `(R̄₂₁R̄₃₁R̄₁₃R̄₁₂, R̄₃₂R̄₂₃)` and commutes with the Cartan action. When the
//! joint spectrum is simple on every weight sector this determines it up
//! to signs, which are fixed by continuity from the classical eigenbasis.
//! `G₁₂` is the mirror construction with the fused pair `(1 2)`.

mod oracle;

use crate::algebra::SeriesSpec;
use crate::error::{Error, Result};
use crate::linops::{self, DenseMatrix, LegShape, DEFAULT_REL_TOL};
use crate::rmatrices::{self, QParam};
use crate::twist::{assemble_f, spectral_basis, weight_partition, FMatrix, LabeledBasis};

pub use oracle::{cg_oracle, racah_oracle, CgTable, RacahBlock};

/// Extrapolation ladder for `q → 0`: `q_k = 10⁻³·2^k`.
pub const LIMIT_LADDER: [f64; 5] = [1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2];

/// Largest accepted change between the 4- and 5-point extrapolations.
pub const LIMIT_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Fused pair `1(23)`, inner pair `(2 3)`.
    Right,
    /// Fused pair `(12)3`, inner pair `(1 2)`.
    Left,
}

/// Commuting operators on `V ⊗ V ⊗ V`, deformed and classical.
#[derive(Clone, Debug)]
pub struct TripleOperators {
    pub spec: SeriesSpec,
    pub q: QParam,
    pub side: Side,
    pub qbar_fused: DenseMatrix,
    pub qbar_inner: DenseMatrix,
    pub q_fused: DenseMatrix,
    pub q_inner: DenseMatrix,
}

/// `τ` operators `(fused, inner)` on the triple space.
pub fn classical_taus(spec: &SeriesSpec, side: Side) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = spec.n();
    let tau = rmatrices::exponent_model(spec)?.tau();
    let on = |a: usize, b: usize| linops::embed(&tau, n, 3, &[a, b]);
    Ok(match side {
        Side::Right => (on(0, 1)? + on(0, 2)?, on(1, 2)?),
        Side::Left => (on(0, 2)? + on(1, 2)?, on(0, 1)?),
    })
}

/// `q^S` for symmetric `S`.
fn sym_power(s: &DenseMatrix, q: QParam) -> Result<DenseMatrix> {
    let dim = s.nrows();
    let mut out = DenseMatrix::zeros(dim, dim);
    for c in linops::sym_eigencluster(s, DEFAULT_REL_TOL)? {
        out += c.projector() * q.pow(c.value)?;
    }
    Ok(out)
}

fn fused_operators(spec: &SeriesSpec, q: QParam, side: Side) -> Result<TripleOperators> {
    let n = spec.n();
    let r = rmatrices::r_bar(spec, q)?.matrix;
    let leg = |a: usize, b: usize| linops::embed(&r, n, 3, &[a, b]);
    let (qbar_fused, qbar_inner) = match side {
        Side::Right => (
            leg(1, 0)? * leg(2, 0)? * leg(0, 2)? * leg(0, 1)?,
            leg(2, 1)? * leg(1, 2)?,
        ),
        Side::Left => (
            leg(2, 1)? * leg(2, 0)? * leg(0, 2)? * leg(1, 2)?,
            leg(1, 0)? * leg(0, 1)?,
        ),
    };
    let (tf, ti) = classical_taus(spec, side)?;
    Ok(TripleOperators {
        spec: *spec,
        q,
        side,
        qbar_fused,
        qbar_inner,
        q_fused: sym_power(&tf, q)?,
        q_inner: sym_power(&ti, q)?,
    })
}

pub fn fused_operators_right(spec: &SeriesSpec, q: QParam) -> Result<TripleOperators> {
    fused_operators(spec, q, Side::Right)
}

pub fn fused_operators_left(spec: &SeriesSpec, q: QParam) -> Result<TripleOperators> {
    fused_operators(spec, q, Side::Left)
}

/// The q-independent classical joint eigenbasis, labeled by the
/// eigenvalues of the fused and inner `τ`.
pub fn classical_triple_basis(spec: &SeriesSpec, side: Side) -> Result<LabeledBasis> {
    let n = spec.n();
    let (tf, ti) = classical_taus(spec, side)?;
    let part = weight_partition(spec, &LegShape::uniform(n, 3))?;
    spectral_basis(spec, &[tf, ti], &part, QParam::ONE, None)
}

fn g_matrix(spec: &SeriesSpec, q: QParam, side: Side) -> Result<FMatrix> {
    let classical = classical_triple_basis(spec, side)?;
    if q.is_one() {
        return assemble_f(&classical, &classical);
    }
    let ops = fused_operators(spec, q, side)?;
    let part = weight_partition(spec, &LegShape::uniform(spec.n(), 3))?;
    let deformed = spectral_basis(
        spec,
        &[ops.qbar_fused, ops.qbar_inner],
        &part,
        q,
        Some(&classical),
    )?;
    assemble_f(&deformed, &classical)
}

/// `G₂₃ = F₂₃ (id⊗Δ)(F)`.
pub fn g_right(spec: &SeriesSpec, q: QParam) -> Result<FMatrix> {
    g_matrix(spec, q, Side::Right)
}

/// `G₁₂ = F₁₂ (Δ⊗id)(F)`.
pub fn g_left(spec: &SeriesSpec, q: QParam) -> Result<FMatrix> {
    g_matrix(spec, q, Side::Left)
}

/// The coassociator of the twisted coproduct.
#[derive(Clone, Debug)]
pub struct Associator {
    pub spec: SeriesSpec,
    pub q: QParam,
    pub matrix: DenseMatrix,
}

/// `Φ = G₂₃⁻¹ G₁₂`.
pub fn phi(spec: &SeriesSpec, q: QParam) -> Result<Associator> {
    let gr = g_right(spec, q)?;
    let gl = g_left(spec, q)?;
    Ok(Associator {
        spec: *spec,
        q,
        matrix: gr.matrix.transpose() * gl.matrix,
    })
}

/// Value at `x = 0` of the interpolating polynomial through `(xs, ms)`.
pub fn neville_at_zero(xs: &[f64], ms: &[DenseMatrix]) -> DenseMatrix {
    let mut p: Vec<DenseMatrix> = ms.to_vec();
    let len = xs.len();
    for k in 1..len {
        for i in 0..len - k {
            let (a, b) = (xs[i], xs[i + k]);
            p[i] = (&p[i] * b - &p[i + 1] * a) / (b - a);
        }
    }
    p.swap_remove(0)
}

/// `G(0)` by polynomial extrapolation over [`LIMIT_LADDER`], with the
/// change against the extrapolation that drops the largest point.
pub fn g_limit(spec: &SeriesSpec, side: Side) -> Result<(DenseMatrix, f64)> {
    let ms = LIMIT_LADDER
        .iter()
        .map(|&x| g_matrix(spec, QParam::new(x)?, side).map(|f| f.matrix))
        .collect::<Result<Vec<_>>>()?;
    let full = neville_at_zero(&LIMIT_LADDER, &ms);
    let short = neville_at_zero(&LIMIT_LADDER[..4], &ms[..4]);
    let discrepancy = linops::residual(&full, &short)?;
    Ok((full, discrepancy))
}

/// `dF^{[01]} = G₂₃(0) G₁₂(0)⁻¹`.
pub fn racah_coboundary(spec: &SeriesSpec) -> Result<DenseMatrix> {
    let (gr, dr) = g_limit(spec, Side::Right)?;
    let (gl, dl) = g_limit(spec, Side::Left)?;
    let discrepancy = dr.max(dl);
    if discrepancy > LIMIT_TOLERANCE {
        return Err(Error::LimitNotConverged { discrepancy });
    }
    Ok(gr * gl.transpose())
}

/// Reverses the three legs on both sides.
pub fn reverse_legs(m: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    linops::leg_permute(m, &LegShape::uniform(n, 3), &[2, 1, 0])
}

/// Smallest residual `‖P_r S_r A S_c P_c − B‖∞` over row and column
/// permutations `P` and sign matrices `S`. Intended for blocks of size ≤ 4.
pub fn signed_permutation_residual(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: a.nrows(),
        });
    }
    let (rows, cols) = a.shape();
    let mut best = f64::INFINITY;
    for rp in permutations(rows) {
        for cp in permutations(cols) {
            let m = DenseMatrix::from_fn(rows, cols, |r, c| a[(rp[r], cp[c])]);
            // with rows fixed, each column's best sign is independent; try
            // every row sign pattern
            for rs in 0..(1u32 << rows) {
                let mut worst: f64 = 0.0;
                for c in 0..cols {
                    let mut plus: f64 = 0.0;
                    let mut minus: f64 = 0.0;
                    for r in 0..rows {
                        let sr = if rs >> r & 1 == 1 { -1.0 } else { 1.0 };
                        let x = sr * m[(r, c)];
                        plus = plus.max((x - b[(r, c)]).abs());
                        minus = minus.max((-x - b[(r, c)]).abs());
                    }
                    worst = worst.max(plus.min(minus));
                }
                best = best.min(worst);
            }
        }
    }
    Ok(best)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
