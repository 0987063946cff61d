//! Deformed R-matrices of the defining representations, the monodromy
//! `Q̄ = R̄₂₁R̄₁₂`, and the classical exponent model `Q = Σ q^ℓ P`.
//!
//! The raw matrix follows the lower-triangular convention: the
//! `(q − q⁻¹)` terms sit on `E_ij ⊗ E_ji` with `i > j`. The normalized `R̄`
//! is `q^γ` times the raw matrix with `γ = −1/n` for A and `γ = 0` for B, C,
//! D, which makes `det Q̄ = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Series, SeriesSpec};
use crate::error::{Error, Result};
use crate::linops::{self, DenseMatrix, DEFAULT_REL_TOL};

/// Probe values used to extract exponents.
pub const PROBE_Q0: f64 = 2.0;
pub const PROBE_Q1: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QKind {
    Zero,
    One,
    Generic,
}

/// A deformation parameter `q = e^h ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QParam {
    value: f64,
    kind: QKind,
}

impl QParam {
    pub const ZERO: QParam = QParam {
        value: 0.0,
        kind: QKind::Zero,
    };
    pub const ONE: QParam = QParam {
        value: 1.0,
        kind: QKind::One,
    };

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidQ(value));
        }
        let kind = if value == 0.0 {
            QKind::Zero
        } else if value == 1.0 {
            QKind::One
        } else {
            QKind::Generic
        };
        Ok(QParam { value, kind })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn kind(&self) -> QKind {
        self.kind
    }

    /// `ln q`; zero at `q = 1`, `None` at `q = 0`.
    pub fn h(&self) -> Option<f64> {
        match self.kind {
            QKind::Zero => None,
            QKind::One => Some(0.0),
            QKind::Generic => Some(self.value.ln()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == QKind::Zero
    }

    pub fn is_one(&self) -> bool {
        self.kind == QKind::One
    }

    pub fn inverse(&self) -> Result<QParam> {
        match self.kind {
            QKind::Zero => Err(Error::UnsupportedAtZero),
            _ => QParam::new(1.0 / self.value),
        }
    }

    /// `φ` with `q = tan φ`.
    pub fn angle(&self) -> f64 {
        self.value.atan()
    }

    /// `q^e`, rejecting `q = 0`.
    pub fn pow(&self, e: f64) -> Result<f64> {
        match self.h() {
            Some(h) => Ok((e * h).exp()),
            None => Err(Error::UnsupportedAtZero),
        }
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A normalized R-matrix together with the scalar applied to the raw one.
#[derive(Clone, Debug)]
pub struct RData {
    pub spec: SeriesSpec,
    pub q: QParam,
    pub matrix: DenseMatrix,
    pub scale: f64,
}

/// `ρ` exponents and `ε` signs of the orthosymplectic block, 0-based.
fn rho_eps(spec: &SeriesSpec) -> (Vec<f64>, Vec<f64>) {
    let r = spec.rank();
    let n = spec.n();
    let half: Vec<f64> = match spec.series() {
        Series::B => (0..r).map(|i| r as f64 - 0.5 - i as f64).collect(),
        Series::C => (0..r).map(|i| (r - i) as f64).collect(),
        Series::D => (0..r).map(|i| (r - 1 - i) as f64).collect(),
        Series::A => unreachable!("no ρ table for A"),
    };
    let mut rho = half.clone();
    if spec.series() == Series::B {
        rho.push(0.0);
    }
    rho.extend(half.iter().rev().map(|x| -x));
    let eps = (0..n)
        .map(|i| {
            if spec.series() == Series::C && i >= r {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    (rho, eps)
}

/// `ε_i` signs of the invariant bilinear form, 0-based (all `+1` for A, B, D).
pub fn form_signs(spec: &SeriesSpec) -> Vec<f64> {
    match spec.series() {
        Series::A => vec![1.0; spec.n()],
        _ => rho_eps(spec).1,
    }
}

/// Raw defining-representation R-matrix, before normalization.
pub fn frt_r(spec: &SeriesSpec, q: QParam) -> Result<DenseMatrix> {
    let qv = q.value();
    if q.is_zero() {
        return Err(Error::UnsupportedAtZero);
    }
    let n = spec.n();
    let at = |i: usize, j: usize| i * n + j;
    let d = qv - 1.0 / qv;
    let mut r = DenseMatrix::zeros(n * n, n * n);
    let bar = |i: usize| n - 1 - i;

    if spec.series() == Series::A {
        for i in 0..n {
            for j in 0..n {
                r[(at(i, j), at(i, j))] = if i == j { qv } else { 1.0 };
                if i > j {
                    // E_ij ⊗ E_ji sends e_j⊗e_i to e_i⊗e_j
                    r[(at(i, j), at(j, i))] += d;
                }
            }
        }
        return Ok(r);
    }

    let (rho, eps) = rho_eps(spec);
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j {
                if i == bar(i) {
                    1.0
                } else {
                    qv
                }
            } else if j == bar(i) {
                1.0 / qv
            } else {
                1.0
            };
            r[(at(i, j), at(i, j))] += diag;
            if i > j {
                r[(at(i, j), at(j, i))] += d;
                let w = d * qv.powf(rho[i] - rho[j]) * eps[i] * eps[j];
                // E_ij ⊗ E_{ī j̄} sends e_j⊗e_{j̄} to e_i⊗e_{ī}
                r[(at(i, bar(i)), at(j, bar(j)))] -= w;
            }
        }
    }
    Ok(r)
}

/// Exponent `γ` of the normalization `R̄ = q^γ R_raw`.
pub fn normalization_exponent(spec: &SeriesSpec) -> f64 {
    match spec.series() {
        Series::A => -1.0 / spec.n() as f64,
        _ => 0.0,
    }
}

pub fn r_bar(spec: &SeriesSpec, q: QParam) -> Result<RData> {
    let raw = frt_r(spec, q)?;
    let scale = q.pow(normalization_exponent(spec))?;
    let matrix = raw * scale;
    linops::check_finite(&matrix)?;
    Ok(RData {
        spec: *spec,
        q,
        matrix,
        scale,
    })
}

/// `Q̄ = R̄₂₁R̄₁₂` for the normalized `R̄`.
pub fn qbar(spec: &SeriesSpec, q: QParam) -> Result<DenseMatrix> {
    let r = r_bar(spec, q)?.matrix;
    qbar_from_r(&r, spec.n())
}

pub fn qbar_from_r(r: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    let r21 = linops::swap_legs(r, n)?;
    Ok(r21 * r)
}

/// Swap operator `σ` on `V ⊗ V`.
pub fn swap_matrix(n: usize) -> DenseMatrix {
    let mut p = DenseMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(j * n + i, i * n + j)] = 1.0;
        }
    }
    p
}

/// Unit invariant vector `Σ ε_i e_i ⊗ e_ī / √n` of the orthosymplectic form.
pub fn trace_vector(spec: &SeriesSpec) -> nalgebra::DVector<f64> {
    let n = spec.n();
    let eps = form_signs(spec);
    let mut w = nalgebra::DVector::zeros(n * n);
    for i in 0..n {
        w[i * n + (n - 1 - i)] = eps[i] / (n as f64).sqrt();
    }
    w
}

/// Classical projectors ordered as (symmetric[-traceless],
/// antisymmetric[-traceless], trace); rank-zero members are dropped.
pub fn classical_projector_set(spec: &SeriesSpec) -> Vec<DenseMatrix> {
    let n = spec.n();
    let id = DenseMatrix::identity(n * n, n * n);
    let sigma = swap_matrix(n);
    let mut sym = (&id + &sigma) * 0.5;
    let mut anti = (&id - &sigma) * 0.5;
    let mut out = Vec::new();
    if spec.series() == Series::A {
        out.push(sym);
        out.push(anti);
    } else {
        let w = trace_vector(spec);
        let tr = &w * w.transpose();
        if spec.series() == Series::C {
            anti -= &tr;
        } else {
            sym -= &tr;
        }
        out.push(sym);
        out.push(anti);
        out.push(tr);
    }
    out.retain(|p| p.trace().round() as i64 > 0);
    out
}

pub fn projector_rank(p: &DenseMatrix) -> usize {
    p.trace().round() as usize
}

/// Classical projectors with q-independent exponents: `Q(q) = Σ q^{ℓ_k} P^{(k)}`.
#[derive(Clone, Debug)]
pub struct SpectralModel {
    pub spec: SeriesSpec,
    pub projectors: Vec<DenseMatrix>,
    pub exponents: Vec<f64>,
}

impl SpectralModel {
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(projector_rank).collect()
    }

    /// `Σ q^{ℓ_k} P^{(k)}`.
    pub fn classical_q(&self, q: QParam) -> Result<DenseMatrix> {
        self.power_sum(q, 1.0)
    }

    /// `Σ q^{ℓ_k/2} P^{(k)}`, the classical `R = Q^{1/2}`.
    pub fn classical_r(&self, q: QParam) -> Result<DenseMatrix> {
        self.power_sum(q, 0.5)
    }

    /// `τ = Σ ℓ_k P^{(k)}`, so that `Q = q^τ`.
    pub fn tau(&self) -> DenseMatrix {
        let dim = self.projectors[0].nrows();
        self.projectors
            .iter()
            .zip(&self.exponents)
            .fold(DenseMatrix::zeros(dim, dim), |acc, (p, l)| acc + p * *l)
    }

    fn power_sum(&self, q: QParam, factor: f64) -> Result<DenseMatrix> {
        let dim = self.projectors[0].nrows();
        let mut out = DenseMatrix::zeros(dim, dim);
        for (p, l) in self.projectors.iter().zip(&self.exponents) {
            out += p * q.pow(factor * l)?;
        }
        Ok(out)
    }
}

pub fn classical_q(model: &SpectralModel, q: QParam) -> Result<DenseMatrix> {
    model.classical_q(q)
}

/// Raw exponents `ln λ / ln q` of `σR_raw σR_raw` paired with the classical
/// projectors by multiplicity.
fn raw_exponents(spec: &SeriesSpec, probe: f64, ranks: &[usize]) -> Result<Vec<f64>> {
    let q = QParam::new(probe)?;
    let raw = frt_r(spec, q)?;
    let qb = qbar_from_r(&raw, spec.n())?;
    let clusters = linops::sym_eigencluster(&qb, DEFAULT_REL_TOL)?;
    let mults: Vec<usize> = clusters.iter().map(|c| c.multiplicity()).collect();
    let mut out = Vec::with_capacity(ranks.len());
    for &rank in ranks {
        let hits: Vec<&linops::EigenCluster> = clusters
            .iter()
            .filter(|c| c.multiplicity() == rank)
            .collect();
        if hits.len() != 1 {
            return Err(Error::SpectrumMismatch(format!(
                "{spec}: cannot pair projector rank {rank} with multiplicities {mults:?}"
            )));
        }
        if hits[0].value <= 0.0 {
            return Err(Error::SpectrumMismatch(format!(
                "{spec}: non-positive eigenvalue {}",
                hits[0].value
            )));
        }
        out.push(hits[0].value.ln() / probe.ln());
    }
    if clusters.len() != ranks.len() {
        return Err(Error::SpectrumMismatch(format!(
            "{spec}: {} eigenvalue clusters for {} projectors",
            clusters.len(),
            ranks.len()
        )));
    }
    Ok(out)
}

/// Fits the exponent model at `q = 2` and validates it at `q = 3`.
pub fn exponent_model(spec: &SeriesSpec) -> Result<SpectralModel> {
    let projectors = classical_projector_set(spec);
    let ranks: Vec<usize> = projectors.iter().map(projector_rank).collect();
    let raw0 = raw_exponents(spec, PROBE_Q0, &ranks)?;
    let raw1 = raw_exponents(spec, PROBE_Q1, &ranks)?;

    // det Q̄ = 1 fixes the scalar: Σ rank·(ℓ_raw + 2γ) = 0
    let total: f64 = ranks.iter().map(|&r| r as f64).sum();
    let weighted: f64 = ranks.iter().zip(&raw0).map(|(&r, l)| r as f64 * l).sum();
    let gamma = -weighted / (2.0 * total);
    let frozen = normalization_exponent(spec);
    if (gamma - frozen).abs() > 1e-8 {
        return Err(Error::SpectrumMismatch(format!(
            "{spec}: fitted normalization exponent {gamma} differs from {frozen}"
        )));
    }
    for (a, b) in raw0.iter().zip(&raw1) {
        if (a - b).abs() > 1e-8 {
            return Err(Error::SpectrumMismatch(format!(
                "{spec}: exponent {a} at q={PROBE_Q0} but {b} at q={PROBE_Q1}"
            )));
        }
    }
    let exponents = raw0.iter().map(|l| l + 2.0 * frozen).collect();
    Ok(SpectralModel {
        spec: *spec,
        projectors,
        exponents,
    })
}

/// `R̄₁₂R̄₁₃R̄₂₃ − R̄₂₃R̄₁₃R̄₁₂`, max-abs.
pub fn ybe_residual(r: &DenseMatrix, n: usize) -> Result<f64> {
    let r12 = linops::embed(r, n, 3, &[0, 1])?;
    let r13 = linops::embed(r, n, 3, &[0, 2])?;
    let r23 = linops::embed(r, n, 3, &[1, 2])?;
    let lhs = &r12 * &r13 * &r23;
    let rhs = &r23 * &r13 * &r12;
    linops::residual(&lhs, &rhs)
}

/// `Δ(H) = H ⊗ 1 + 1 ⊗ H` on `legs` copies.
pub fn coproduct_cartan(h: &DenseMatrix, legs: usize) -> DenseMatrix {
    let n = h.nrows();
    let dim = n.pow(legs as u32);
    (0..legs).fold(DenseMatrix::zeros(dim, dim), |acc, l| {
        acc + linops::embed(h, n, legs, &[l]).expect("valid leg")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cartan_generators;

    fn spec(s: &str) -> SeriesSpec {
        s.parse().unwrap()
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn sorted_eigs(m: &DenseMatrix) -> Vec<f64> {
        let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn qparam_kinds() {
        assert_eq!(q(0.0).kind(), QKind::Zero);
        assert_eq!(q(1.0).kind(), QKind::One);
        assert_eq!(q(2.0).kind(), QKind::Generic);
        assert!((q(2.0).h().unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(QParam::new(-1.0).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert!(q(0.0).inverse().is_err());
        assert_eq!(q(4.0).inverse().unwrap().value(), 0.25);
    }

    #[test]
    fn a1_at_one_is_identity() {
        let r = frt_r(&spec("A1"), QParam::ONE).unwrap();
        assert_eq!(r, DenseMatrix::identity(4, 4));
    }

    #[test]
    fn frt_rejects_zero() {
        assert_eq!(
            frt_r(&spec("A1"), QParam::ZERO).unwrap_err(),
            Error::UnsupportedAtZero
        );
    }

    #[test]
    fn a1_braid_eigenvalues() {
        let qv = 1.7;
        let r = frt_r(&spec("A1"), q(qv)).unwrap();
        let rhat = swap_matrix(2) * r;
        let mut eig: Vec<f64> = rhat.complex_eigenvalues().iter().map(|z| z.re).collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [-1.0 / qv, qv, qv, qv];
        for (a, b) in eig.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{eig:?}");
        }
    }

    #[test]
    fn b1_yang_baxter() {
        let r = r_bar(&spec("B1"), q(2.0)).unwrap();
        assert!(ybe_residual(&r.matrix, 3).unwrap() < 1e-10);
    }

    #[test]
    fn yang_baxter_and_transpose_symmetry_small_specs() {
        for s in ["A1", "A2", "A3", "B1", "B2", "C1", "C2", "D2", "D3"] {
            let sp = spec(s);
            let n = sp.n();
            for qv in [0.1, 0.5, 2.0, 10.0] {
                let r = r_bar(&sp, q(qv)).unwrap().matrix;
                let ybe = ybe_residual(&r, n).unwrap();
                assert!(ybe < 1e-10 * linops::max_abs(&r).powi(3), "{s} q={qv}: {ybe}");
                let t = linops::residual(&r.transpose(), &linops::swap_legs(&r, n).unwrap()).unwrap();
                assert!(t < 1e-12, "{s} q={qv}: {t}");
            }
        }
    }

    #[test]
    fn tampered_r_fails_yang_baxter() {
        let mut r = r_bar(&spec("A1"), q(2.0)).unwrap().matrix;
        r[(1, 1)] = 0.0;
        assert!(ybe_residual(&r, 2).unwrap() > 1e-3);
    }

    #[test]
    fn projector_ranks() {
        let ranks = |s: &str| {
            let mut r: Vec<usize> = classical_projector_set(&spec(s)).iter().map(projector_rank).collect();
            r.sort_unstable();
            r
        };
        assert_eq!(ranks("A1"), vec![1, 3]);
        assert_eq!(ranks("D2"), vec![1, 6, 9]);
        assert_eq!(ranks("C2"), vec![1, 5, 10]);
        assert_eq!(ranks("C1"), vec![1, 3]);
        assert_eq!(ranks("B1"), vec![1, 3, 5]);
    }

    #[test]
    fn projectors_form_complete_orthogonal_family() {
        for s in ["A2", "B2", "C3", "D3"] {
            let ps = classical_projector_set(&spec(s));
            let dim = ps[0].nrows();
            let sum = ps.iter().fold(DenseMatrix::zeros(dim, dim), |a, p| a + p);
            assert!(linops::residual(&sum, &DenseMatrix::identity(dim, dim)).unwrap() < 1e-14);
            for (i, a) in ps.iter().enumerate() {
                for (j, b) in ps.iter().enumerate() {
                    let expect = if i == j { a.clone() } else { DenseMatrix::zeros(dim, dim) };
                    assert!(linops::residual(&(a * b), &expect).unwrap() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn a1_exponents() {
        let m = exponent_model(&spec("A1")).unwrap();
        assert_eq!(m.ranks(), vec![3, 1]);
        assert!((m.exponents[0] - 1.0).abs() < 1e-10);
        assert!((m.exponents[1] + 3.0).abs() < 1e-10);
    }

    #[test]
    fn a2_exponent_gap_is_four() {
        let m = exponent_model(&spec("A2")).unwrap();
        assert!((m.exponents[0] - m.exponents[1] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn orthosymplectic_exponents() {
        for (s, expect) in [
            ("B1", [2.0, -2.0, -4.0]),
            ("B2", [2.0, -2.0, -8.0]),
            ("D2", [2.0, -2.0, -6.0]),
            ("C2", [2.0, -2.0, -10.0]),
        ] {
            let m = exponent_model(&spec(s)).unwrap();
            for (a, b) in m.exponents.iter().zip(expect) {
                assert!((a - b).abs() < 1e-9, "{s}: {:?}", m.exponents);
            }
        }
    }

    #[test]
    fn classical_q_examples() {
        let m = exponent_model(&spec("A1")).unwrap();
        assert!(linops::residual(&m.classical_q(QParam::ONE).unwrap(), &DenseMatrix::identity(4, 4)).unwrap() < 1e-15);
        let e = sorted_eigs(&m.classical_q(q(4.0)).unwrap());
        assert!((e[0] - 4f64.powi(-3)).abs() < 1e-12);
        assert!(e[1..].iter().all(|x| (x - 4.0).abs() < 1e-12));
        assert_eq!(m.classical_q(QParam::ZERO).unwrap_err(), Error::UnsupportedAtZero);
        let h = &cartan_generators(&spec("A1"))[0];
        let dh = coproduct_cartan(h, 2);
        assert_eq!(linops::commutator_residual(&m.classical_q(q(3.0)).unwrap(), &dh), 0.0);
    }

    #[test]
    fn qbar_examples() {
        let sp = spec("A1");
        assert!(linops::residual(&qbar(&sp, QParam::ONE).unwrap(), &DenseMatrix::identity(4, 4)).unwrap() < 1e-15);
        let e = sorted_eigs(&qbar(&sp, q(2.0)).unwrap());
        assert!((e[0] - 0.125).abs() < 1e-12);
        assert!(e[1..].iter().all(|x| (x - 2.0).abs() < 1e-12));

        let b1 = spec("B1");
        let m = exponent_model(&b1).unwrap();
        let a = sorted_eigs(&qbar(&b1, q(3.0)).unwrap());
        let b = sorted_eigs(&m.classical_q(q(3.0)).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }

    #[test]
    fn qbar_symmetric_and_cartan_invariant() {
        for s in ["A2", "B2", "C2", "D3"] {
            let sp = spec(s);
            let m = exponent_model(&sp).unwrap();
            for qv in [0.5, 2.0] {
                let qb = qbar(&sp, q(qv)).unwrap();
                let qc = m.classical_q(q(qv)).unwrap();
                let tol = 1e-12 * linops::max_abs(&qb).max(1.0);
                assert!(linops::residual(&qb, &qb.transpose()).unwrap() < tol);
                assert!(linops::residual(&qc, &qc.transpose()).unwrap() < tol);
                for h in cartan_generators(&sp) {
                    let dh = coproduct_cartan(&h, 2);
                    assert!(linops::commutator_residual(&qb, &dh) < tol);
                    assert!(linops::commutator_residual(&qc, &dh) < tol);
                }
            }
        }
    }
}
