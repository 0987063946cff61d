//! Identity checks on constructed twists, collected into a
//! [`VerificationReport`].
//!
//! Every check returns a non-negative max-abs residual. The suite compares
//! each against a tolerance: `1e-10` for algebraic identities on pairs,
//! `1e-9` where eigenvalue clustering enters and `1e-8` for triple-space
//! checks, all scaled by a caller-supplied multiplier.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::{cartan_generators, Series, SeriesSpec};
use crate::coassoc;
use crate::error::{Error, Result};
use crate::linops::{self, DenseMatrix, DEFAULT_REL_TOL};
use crate::rmatrices::{self, QKind, QParam};
use crate::twist::{compose, crystal_basis, f_interval, ClosedTag, LabelKey, LabeledBasis};

pub const PAIR_TOL: f64 = 1e-10;
pub const SPECTRAL_TOL: f64 = 1e-9;
pub const TRIPLE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec: String,
    pub q: Vec<f64>,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new(spec: &SeriesSpec, q: &[f64], checks: Vec<Check>) -> Self {
        let overall = checks.iter().all(|c| c.pass);
        VerificationReport {
            spec: spec.to_string(),
            q: q.to_vec(),
            checks,
            overall,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `‖FᵀF − I‖∞`.
pub fn check_orthogonality(f: &DenseMatrix) -> f64 {
    linops::orthogonality_defect(f)
}

/// `‖F₂₁ R F₁₂⁻¹ − R̄‖∞` with `F = F^{[q1]}` and `R = Σ q^{ℓ_k/2} P^{(k)}`.
pub fn check_twist_r(spec: &SeriesSpec, q: QParam) -> Result<f64> {
    let f = f_interval(spec, q, QParam::ONE)?.matrix;
    let r = rmatrices::exponent_model(spec)?.classical_r(q)?;
    let rbar = rmatrices::r_bar(spec, q)?.matrix;
    let f21 = linops::swap_legs(&f, spec.n())?;
    linops::residual(&(f21 * r * f.transpose()), &rbar)
}

/// `max_i ‖[F, Δ(Hᵢ)]‖∞`.
pub fn check_cartan_commute(f: &DenseMatrix, spec: &SeriesSpec) -> f64 {
    cartan_generators(spec)
        .iter()
        .map(|h| linops::commutator_residual(f, &rmatrices::coproduct_cartan(h, 2)))
        .fold(0.0, f64::max)
}

/// Eigenprojectors of `Q̄` paired with the classical projectors.
///
/// They are read off the braid operator `Ř = σR̄`, which is symmetric with
/// `Ř² = Q̄` and eigenvalues `±q^{ℓ_k/2}`: its spread is the square root of
/// that of `Q̄`, which keeps small-`q` sectors apart. Each eigenvector is
/// assigned to the exponent nearest to `2 ln|λ| / ln q`; exponents are at
/// least 2 apart, so a miss above 0.1 means the spectrum is wrong.
fn deformed_projectors(spec: &SeriesSpec, q: QParam) -> Result<Vec<(DenseMatrix, DenseMatrix)>> {
    let model = rmatrices::exponent_model(spec)?;
    let braid = rmatrices::swap_matrix(spec.n()) * rmatrices::r_bar(spec, q)?.matrix;
    let defect = linops::residual(&braid, &braid.transpose())?;
    if defect > DEFAULT_REL_TOL * linops::max_abs(&braid) {
        return Err(Error::NotSymmetric {
            defect,
            tolerance: DEFAULT_REL_TOL,
        });
    }
    if q.is_one() {
        return Ok(model.projectors.iter().map(|p| (p.clone(), p.clone())).collect());
    }
    let h = q.h().ok_or(Error::UnsupportedAtZero)?;
    let eig = braid.symmetric_eigen();
    let dim = eig.eigenvalues.len();
    let mut pbar = vec![DenseMatrix::zeros(dim, dim); model.exponents.len()];
    let mut counts = vec![0usize; model.exponents.len()];
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let l = 2.0 * lambda.abs().ln() / h;
        let (k, miss) = model
            .exponents
            .iter()
            .map(|e| (e - l).abs())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty model");
        if miss > 0.1 {
            return Err(Error::SpectrumMismatch(format!(
                "braid eigenvalue {lambda:e} matches no exponent (nearest off by {miss:e})"
            )));
        }
        let v = eig.eigenvectors.column(i);
        pbar[k] += v * v.transpose();
        counts[k] += 1;
    }
    let mut out = Vec::with_capacity(pbar.len());
    for ((pb, p), count) in pbar.into_iter().zip(&model.projectors).zip(counts) {
        let rank = rmatrices::projector_rank(p);
        if count != rank {
            return Err(Error::SpectrumMismatch(format!(
                "{count} eigenvectors for a projector of rank {rank}"
            )));
        }
        out.push((pb, p.clone()));
    }
    Ok(out)
}

/// `max_k ‖P̄^{(k)}F − FP^{(k)}‖∞`.
pub fn check_intertwine(f: &DenseMatrix, spec: &SeriesSpec, q: QParam) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (pbar, p) in deformed_projectors(spec, q)? {
        worst = worst.max(linops::residual(&(pbar * f), &(f * p))?);
    }
    Ok(worst)
}

/// Product vector `sign·e_i⊗e_j`, 1-based.
fn product(n: usize, i: usize, j: usize, sign: f64) -> DVector<f64> {
    let mut v = DVector::zeros(n * n);
    v[(i - 1) * n + (j - 1)] = sign;
    v
}

/// Distance of `basis` from the crystal table, with `n_minus_sign` used for
/// `|n₋(k);0⟩` in the C series.
pub fn crystal_table_residual(basis: &LabeledBasis, n_minus_sign: f64) -> Result<f64> {
    let spec = basis.spec;
    let n = spec.n();
    let bar = |i: usize| n + 1 - i;
    let twice_s = spec.s().twice();
    let mut worst: f64 = 0.0;
    for (label, v) in basis.labels.iter().zip(&basis.vectors) {
        let LabelKey::Closed(tag) = &label.key else {
            return Err(Error::LabelMismatch);
        };
        // 2(s − k) and 2(s − k + 1) are even for every n± label
        let index = |twice: i32| (twice / 2) as usize;
        let target = match tag {
            ClosedTag::Diagonal { i } => product(n, *i, *i, 1.0),
            ClosedTag::SymPair { i, j } => product(n, *j, *i, 1.0),
            ClosedTag::AntiPair { i, j } => product(n, *i, *j, 1.0),
            ClosedTag::NPlus { k } => {
                let a = index(twice_s - k.twice());
                product(n, bar(a), a, 1.0)
            }
            ClosedTag::NMinus { k } => {
                let a = index(twice_s - k.twice() + 2);
                let sign = if spec.series() == Series::C { n_minus_sign } else { 1.0 };
                product(n, a, bar(a), sign)
            }
            ClosedTag::Trace => product(n, 1, n, 1.0),
        };
        worst = worst.max((v - target).amax());
    }
    Ok(worst)
}

/// Distance of the crystal basis from the signed product vectors of the
/// crystal table.
pub fn check_crystal(spec: &SeriesSpec) -> Result<f64> {
    crystal_table_residual(&crystal_basis(spec)?, -1.0)
}

/// `‖F^{[q₂q₁]}F^{[q₁q₀]} − F^{[q₂q₀]}‖∞`.
pub fn check_composition(spec: &SeriesSpec, q0: QParam, q1: QParam, q2: QParam) -> Result<f64> {
    let two = compose(&f_interval(spec, q2, q1)?, &f_interval(spec, q1, q0)?)?;
    linops::residual(&two.matrix, &f_interval(spec, q2, q0)?.matrix)
}

/// `‖F(q⁻¹) − σF(q)σ‖∞` for `F(q) = F^{[q1]}`.
pub fn check_leg_swap(spec: &SeriesSpec, q: QParam) -> Result<f64> {
    let f = f_interval(spec, q, QParam::ONE)?.matrix;
    let g = f_interval(spec, q.inverse()?, QParam::ONE)?.matrix;
    linops::residual(&g, &linops::swap_legs(&f, spec.n())?)
}

/// Yang–Baxter residual of `R̄`, relative to the size of the triple products.
pub fn check_yang_baxter(r: &DenseMatrix, n: usize) -> Result<f64> {
    let scale = linops::max_abs(r).powi(3).max(1.0);
    Ok(rmatrices::ybe_residual(r, n)? / scale)
}

/// Sorted spectra of `Q̄` and its classical counterpart, relative difference.
pub fn check_spectrum_match(spec: &SeriesSpec, q: QParam) -> Result<f64> {
    let sorted = |m: DenseMatrix| {
        let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let a = sorted(rmatrices::qbar(spec, q)?);
    let b = sorted(rmatrices::exponent_model(spec)?.classical_q(q)?);
    let scale = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale)
}

/// Coassociator checks on the triple space at generic `q`.
pub fn check_phi(spec: &SeriesSpec, q: QParam) -> Result<(f64, f64)> {
    let p = coassoc::phi(spec, q)?.matrix;
    let commute = cartan_generators(spec)
        .iter()
        .map(|h| linops::commutator_residual(&p, &rmatrices::coproduct_cartan(h, 3)))
        .fold(0.0, f64::max);
    Ok((linops::orthogonality_defect(&p), commute))
}

fn fmt_q(q: f64) -> String {
    format!("{q}")
}

/// All checks for `spec` on every `q` of the grid. Tolerances are
/// multiplied by `tol_scale`.
pub fn run_suite_scaled(spec: &SeriesSpec, grid: &[f64], tol_scale: f64) -> Result<VerificationReport> {
    if !(tol_scale.is_finite() && tol_scale >= 1.0) {
        return Err(Error::InvalidTolerance(tol_scale));
    }
    let pair = PAIR_TOL * tol_scale;
    let spectral = SPECTRAL_TOL * tol_scale;
    let triple = TRIPLE_TOL * tol_scale;
    let n = spec.n();
    let mut checks = vec![Check::new("crystal table", check_crystal(spec)?, 0.0)];
    for &qv in grid {
        let q = QParam::new(qv)?;
        let tag = fmt_q(qv);
        let f = f_interval(spec, q, QParam::ONE)?.matrix;
        checks.push(Check::new(format!("orthogonality q={tag}"), check_orthogonality(&f), pair));
        checks.push(Check::new(format!("cartan commute q={tag}"), check_cartan_commute(&f, spec), pair));
        checks.push(Check::new(
            format!("composition via 0 q={tag}"),
            check_composition(spec, QParam::ONE, QParam::ZERO, q)?,
            pair,
        ));
        if q.kind() != QKind::Generic {
            continue;
        }
        let r = rmatrices::r_bar(spec, q)?.matrix;
        checks.push(Check::new(format!("yang-baxter q={tag}"), check_yang_baxter(&r, n)?, pair));
        checks.push(Check::new(format!("spectrum match q={tag}"), check_spectrum_match(spec, q)?, spectral));
        // absolute residual, tolerance scaled by the size of R̄
        let twist_tol = pair * linops::max_abs(&r).max(1.0);
        checks.push(Check::new(format!("twist relation q={tag}"), check_twist_r(spec, q)?, twist_tol));
        checks.push(Check::new(format!("intertwining q={tag}"), check_intertwine(&f, spec, q)?, spectral));
        checks.push(Check::new(format!("leg swap q={tag}"), check_leg_swap(spec, q)?, pair));
        if spec.series() == Series::A && spec.rank() == 1 {
            let (orth, commute) = check_phi(spec, q)?;
            checks.push(Check::new(format!("coassociator orthogonality q={tag}"), orth, triple));
            checks.push(Check::new(format!("coassociator cartan commute q={tag}"), commute, triple));
        }
    }
    Ok(VerificationReport::new(spec, grid, checks))
}

pub fn run_suite(spec: &SeriesSpec, grid: &[f64]) -> Result<VerificationReport> {
    run_suite_scaled(spec, grid, 1.0)
}
