//! Brute-force Clebsch-Gordan and recoupling tables for `su(2)`, used as
//! independent references for the twist computations.
//!
//! Spin-`j` states are stored highest weight first: index `j − m`. A product
//! state `|m₁⟩⊗|m₂⟩` sits at `i₁·(2j₂+1) + i₂`.

use nalgebra::DVector;

use crate::algebra::HalfInt;
use crate::linops::DenseMatrix;

fn dim(j: HalfInt) -> usize {
    (j.twice() + 1) as usize
}

/// `m` of the state at index `i` of spin `j`, doubled.
fn m2(j: HalfInt, i: usize) -> i32 {
    j.twice() - 2 * i as i32
}

/// Lowering operator on spin `j`.
fn lowering(j: HalfInt) -> DenseMatrix {
    let d = dim(j);
    let jj = j.as_f64();
    DenseMatrix::from_fn(d, d, |r, c| {
        if r == c + 1 {
            let m = f64::from(m2(j, c)) / 2.0;
            ((jj + m) * (jj - m + 1.0)).sqrt()
        } else {
            0.0
        }
    })
}

/// Coupled states `|J M⟩` of `j₁ ⊗ j₂` in the product basis.
#[derive(Clone, Debug)]
pub struct CgTable {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub states: Vec<((HalfInt, HalfInt), DVector<f64>)>,
}

impl CgTable {
    pub fn get(&self, total: HalfInt, m: HalfInt) -> Option<&DVector<f64>> {
        self.states
            .iter()
            .find(|((jj, mm), _)| *jj == total && *mm == m)
            .map(|(_, v)| v)
    }

    pub fn totals(&self) -> Vec<HalfInt> {
        let mut t: Vec<HalfInt> = self.states.iter().map(|((j, _), _)| *j).collect();
        t.dedup();
        t
    }
}

/// Clebsch-Gordan vectors with the Condon–Shortley phase: each highest
/// state `|J J⟩` has a positive component on `m₁ = j₁`.
pub fn cg_oracle(j1: HalfInt, j2: HalfInt) -> CgTable {
    let (d1, d2) = (dim(j1), dim(j2));
    let size = d1 * d2;
    let lower = crate::linops::kron(&lowering(j1), &DenseMatrix::identity(d2, d2))
        + crate::linops::kron(&DenseMatrix::identity(d1, d1), &lowering(j2));
    let total_m2 = |p: usize| m2(j1, p / d2) + m2(j2, p % d2);

    let mut states: Vec<((HalfInt, HalfInt), DVector<f64>)> = Vec::new();
    let top = j1.twice() + j2.twice();
    let bottom = (j1.twice() - j2.twice()).abs();
    let mut jt = top;
    while jt >= bottom {
        let total = HalfInt::from_twice(jt);
        // highest state: orthogonal complement of higher J inside M = J
        let sector: Vec<usize> = (0..size).filter(|&p| total_m2(p) == jt).collect();
        let mut best: Option<DVector<f64>> = None;
        for &p in &sector {
            let mut v = DVector::zeros(size);
            v[p] = 1.0;
            for ((_, m), u) in &states {
                if m.twice() == jt {
                    v -= u * u.dot(&v);
                }
            }
            if best.as_ref().is_none_or(|b| v.norm() > b.norm() + 1e-12) {
                best = Some(v);
            }
        }
        let mut v = best.expect("nonempty sector");
        v /= v.norm();
        let lead = sector
            .iter()
            .find(|&&p| p / d2 == 0 && v[p].abs() > 1e-12)
            .or_else(|| sector.iter().find(|&&p| v[p].abs() > 1e-12))
            .copied()
            .expect("nonzero vector");
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        let mut mt = jt;
        loop {
            states.push(((total, HalfInt::from_twice(mt)), v.clone()));
            if mt == -jt {
                break;
            }
            let jj = total.as_f64();
            let m = f64::from(mt) / 2.0;
            v = &lower * &v / ((jj + m) * (jj - m + 1.0)).sqrt();
            mt -= 2;
        }
        jt -= 2;
    }
    CgTable { j1, j2, states }
}

/// One block of the recoupling matrix at fixed total spin.
#[derive(Clone, Debug)]
pub struct RacahBlock {
    pub total: HalfInt,
    /// Intermediate `j₁₂` of the rows.
    pub left: Vec<HalfInt>,
    /// Intermediate `j₂₃` of the columns.
    pub right: Vec<HalfInt>,
    /// `⟨((j₁j₂)j₁₂ j₃) J | (j₁ (j₂j₃)j₂₃) J⟩`.
    pub matrix: DenseMatrix,
}

fn triple_state_left(j1: HalfInt, j2: HalfInt, j3: HalfInt, j12: HalfInt, total: HalfInt) -> DVector<f64> {
    let inner = cg_oracle(j1, j2);
    let outer = cg_oracle(j12, j3);
    let coupled = outer.get(total, total).expect("allowed coupling");
    let (d3, d12) = (dim(j3), dim(j12));
    let mut v = DVector::zeros(dim(j1) * dim(j2) * d3);
    for a in 0..d12 {
        let m12 = HalfInt::from_twice(m2(j12, a));
        let pair = inner.get(j12, m12).expect("allowed state");
        for c in 0..d3 {
            let coef = coupled[a * d3 + c];
            if coef == 0.0 {
                continue;
            }
            for (p, x) in pair.iter().enumerate() {
                v[p * d3 + c] += coef * x;
            }
        }
    }
    v
}

fn triple_state_right(j1: HalfInt, j2: HalfInt, j3: HalfInt, j23: HalfInt, total: HalfInt) -> DVector<f64> {
    let inner = cg_oracle(j2, j3);
    let outer = cg_oracle(j1, j23);
    let coupled = outer.get(total, total).expect("allowed coupling");
    let (d1, d23) = (dim(j1), dim(j23));
    let d_pair = dim(j2) * dim(j3);
    let mut v = DVector::zeros(d1 * d_pair);
    for a in 0..d1 {
        for b in 0..d23 {
            let coef = coupled[a * d23 + b];
            if coef == 0.0 {
                continue;
            }
            let m23 = HalfInt::from_twice(m2(j23, b));
            let pair = inner.get(j23, m23).expect("allowed state");
            for (p, x) in pair.iter().enumerate() {
                v[a * d_pair + p] += coef * x;
            }
        }
    }
    v
}

fn couples(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

fn spins_between(lo: i32, hi: i32) -> Vec<HalfInt> {
    (0..)
        .map(|t| hi - 2 * t)
        .take_while(|&x| x >= lo)
        .map(HalfInt::from_twice)
        .collect()
}

/// Recoupling matrices `((j₁j₂)j₃ | j₁(j₂j₃))`, one block per total spin,
/// descending.
pub fn racah_oracle(j1: HalfInt, j2: HalfInt, j3: HalfInt) -> Vec<RacahBlock> {
    let j12s = spins_between((j1.twice() - j2.twice()).abs(), j1.twice() + j2.twice());
    let j23s = spins_between((j2.twice() - j3.twice()).abs(), j2.twice() + j3.twice());
    let top = j1.twice() + j2.twice() + j3.twice();
    let mut blocks = Vec::new();
    for total in spins_between(top % 2, top) {
        let left: Vec<HalfInt> = j12s.iter().copied().filter(|&x| couples(x, j3, total)).collect();
        let right: Vec<HalfInt> = j23s.iter().copied().filter(|&x| couples(j1, x, total)).collect();
        if left.is_empty() {
            continue;
        }
        let lv: Vec<DVector<f64>> = left.iter().map(|&x| triple_state_left(j1, j2, j3, x, total)).collect();
        let rv: Vec<DVector<f64>> = right.iter().map(|&x| triple_state_right(j1, j2, j3, x, total)).collect();
        let matrix = DenseMatrix::from_fn(left.len(), right.len(), |r, c| lv[r].dot(&rv[c]));
        blocks.push(RacahBlock {
            total,
            left,
            right,
            matrix,
        });
    }
    blocks
}
