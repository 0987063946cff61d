//! Closed-form natural bases and the crystal basis.
//!
//! Off the zero-weight sector every pair `i < j` contributes
//! `|ij+⟩ = (√q eᵢ⊗eⱼ + √q⁻¹ eⱼ⊗eᵢ)/√(q+q⁻¹)` and the orthogonal `|ij−⟩`.
//! The zero-weight sector of B, C and D is built inductively from the
//! centre outwards with index `a = s − k`.
//!
//! Prefactors are written with the even ratios `{a}/{b}` and
//! `(q^a+q^{−a})/(q^b+q^{−b})` so that `q = 1` needs no special casing; the
//! overall sign of each vector is then fixed by continuity from `q = 1`.

use std::f64::consts::{LN_2, PI};

use nalgebra::DVector;

use super::qnumber::{cosh_ratio, ln_cosh, ln_sinh_ratio, odd_factor};
use super::{BasisLabel, ClosedTag, LabelKey, LabeledBasis, SIGN_THRESHOLD};
use crate::algebra::{HalfInt, Series, SeriesSpec, WeightTable};
use crate::error::{Error, Result};
use crate::rmatrices::{QKind, QParam};

/// `q` at which the zero-weight closed forms fix the signs of the crystal
/// vectors used as the natural basis at `q = 0`.
const CRYSTAL_SIGN_PROBE: f64 = 1e-3;

type Entry = (ClosedTag, DVector<f64>);

struct Sector {
    n: usize,
    h: f64,
}

impl Sector {
    fn bar(&self, i: usize) -> usize {
        self.n + 1 - i
    }

    fn zero(&self) -> DVector<f64> {
        DVector::zeros(self.n * self.n)
    }

    /// Adds `c·eᵢ⊗eⱼ`, 1-based.
    fn add(&self, v: &mut DVector<f64>, i: usize, j: usize, c: f64) {
        v[(i - 1) * self.n + (j - 1)] += c;
    }

    fn qpow(&self, e: f64) -> f64 {
        (e * self.h).exp()
    }

    fn r(&self, a: f64, b: f64) -> f64 {
        ln_sinh_ratio(a, b, self.h).exp()
    }

    /// `Σ_i (c q^{−i} e_{s−i}⊗e_{bar} + sign·c q^{i} e_{bar}⊗e_{s−i})` over
    /// `i = first, first+1, … < upto`.
    fn ladder(&self, v: &mut DVector<f64>, s: f64, first: f64, upto: f64, c: f64, sign: f64) {
        let mut i = first;
        while i < upto - 1e-9 {
            let a = (s - i).round() as usize;
            self.add(v, a, self.bar(a), c * self.qpow(-i));
            self.add(v, self.bar(a), a, sign * c * self.qpow(i));
            i += 1.0;
        }
    }

    /// `A·(q^p e_a⊗e_ā + sign·q^{−p} e_ā⊗e_a)`.
    fn centre(&self, v: &mut DVector<f64>, a: usize, amp: f64, p: f64, sign: f64) {
        self.add(v, a, self.bar(a), amp * self.qpow(p));
        self.add(v, self.bar(a), a, sign * amp * self.qpow(-p));
    }

    /// `√({1}/{2} · {k}/{1} · {k+1}/{1})`-type normalization for the
    /// three-term products appearing in the n± vectors.
    fn triple_norm(&self, k1: f64, k2: f64) -> f64 {
        (0.5 * (ln_sinh_ratio(1.0, 2.0, self.h)
            + ln_sinh_ratio(1.0, k1, self.h)
            + ln_sinh_ratio(1.0, k2, self.h)))
            .exp()
    }

    /// `√({1}/{2} · c(k1)/c(k2))`.
    fn centre_norm(&self, k1: f64, k2: f64) -> f64 {
        (self.r(1.0, 2.0) * cosh_ratio(k1, k2, self.h)).sqrt()
    }

    /// `√({1}/{m} / (q^p + q^{−p}))`.
    fn trace_norm(&self, m: f64, p: f64) -> f64 {
        (0.5 * (ln_sinh_ratio(1.0, m, self.h) - LN_2 - ln_cosh(p * self.h))).exp()
    }
}

fn zero_sector_d(sec: &Sector) -> Vec<Entry> {
    let s = sec.n / 2;
    let sf = s as f64;
    let mut out = Vec::new();
    for k in 1..s {
        let kf = k as f64;
        let a = s - k;
        let norm = sec.triple_norm(kf, kf + 1.0);
        let mut v = sec.zero();
        sec.centre(&mut v, a, norm * sec.r(kf, 1.0), 1.0, 1.0);
        sec.ladder(&mut v, sf, 0.0, kf, -norm, 1.0);
        out.push((ClosedTag::NPlus { k: HalfInt::from_int(k as i32) }, v));
    }
    for k in 0..s {
        let kf = k as f64;
        let a = s - k;
        let mut v = sec.zero();
        sec.centre(&mut v, a, sec.centre_norm(kf - 1.0, kf), 0.0, -1.0);
        sec.ladder(&mut v, sf, 0.0, kf, odd_factor(kf - 1.0, kf, sec.h), 1.0);
        out.push((ClosedTag::NMinus { k: HalfInt::from_int(k as i32) }, v));
    }
    let mut v = sec.zero();
    sec.ladder(&mut v, sf, 0.0, sf, sec.trace_norm(sf, sf - 1.0), 1.0);
    out.push((ClosedTag::Trace, v));
    out
}

fn zero_sector_b(sec: &Sector) -> Vec<Entry> {
    let r = (sec.n - 1) / 2;
    let s = r as f64 + 0.5;
    let m = r + 1;
    let mut out = Vec::new();
    for t in 0..r {
        let k = t as f64 + 0.5;
        let a = (s - k).round() as usize;
        let tag_k = HalfInt::from_twice(2 * t as i32 + 1);
        let norm = sec.triple_norm(k, k + 1.0);
        let mut v = sec.zero();
        sec.centre(&mut v, a, norm * sec.r(k, 1.0), 1.0, 1.0);
        sec.add(&mut v, m, m, -norm);
        sec.ladder(&mut v, s, 0.5, k, -norm, 1.0);
        out.push((ClosedTag::NPlus { k: tag_k }, v));

        let odd = odd_factor(k - 1.0, k, sec.h);
        let mut v = sec.zero();
        sec.centre(&mut v, a, sec.centre_norm(k - 1.0, k), 0.0, -1.0);
        sec.add(&mut v, m, m, odd);
        sec.ladder(&mut v, s, 0.5, k, odd, 1.0);
        out.push((ClosedTag::NMinus { k: tag_k }, v));
    }
    let c = sec.trace_norm(s, s - 1.0);
    let mut v = sec.zero();
    sec.add(&mut v, m, m, c);
    sec.ladder(&mut v, s, 0.5, s, c, 1.0);
    out.push((ClosedTag::Trace, v));
    out
}

fn zero_sector_c(sec: &Sector) -> Vec<Entry> {
    let s = sec.n / 2 + 1;
    let sf = s as f64;
    let mut out = Vec::new();
    for k in 1..s {
        let kf = k as f64;
        let a = s - k;
        let mut v = sec.zero();
        sec.centre(&mut v, a, sec.centre_norm(kf, kf + 1.0), 1.0, 1.0);
        sec.ladder(&mut v, sf, 1.0, kf, odd_factor(kf, kf + 1.0, sec.h), -1.0);
        out.push((ClosedTag::NPlus { k: HalfInt::from_int(k as i32) }, v));
    }
    for k in 2..s {
        let kf = k as f64;
        let a = s - k;
        let norm = sec.triple_norm(kf - 1.0, kf);
        let mut v = sec.zero();
        sec.centre(&mut v, a, norm * sec.r(kf - 1.0, 1.0), 0.0, -1.0);
        sec.ladder(&mut v, sf, 1.0, kf, -norm, -1.0);
        out.push((ClosedTag::NMinus { k: HalfInt::from_int(k as i32) }, v));
    }
    let mut v = sec.zero();
    sec.ladder(&mut v, sf, 1.0, sf, sec.trace_norm(sf - 1.0, sf), -1.0);
    out.push((ClosedTag::Trace, v));
    out
}

fn zero_sector_raw(spec: &SeriesSpec, h: f64) -> Vec<Entry> {
    let sec = Sector { n: spec.n(), h };
    match spec.series() {
        Series::B => zero_sector_b(&sec),
        Series::C => zero_sector_c(&sec),
        Series::D => zero_sector_d(&sec),
        Series::A => Vec::new(),
    }
}

/// Rotation angle applied to `n−(0), n−(1)` of D. Both vectors share one
/// eigenspace of `Q̄`; the rotation vanishes at `q = 1` and sends them to
/// the crystal vectors `e_{s+1}⊗e_s` and `e_s⊗e_{s+1}` as `q → 0`.
fn d_centre_angle(h: f64) -> f64 {
    -0.75 * PI * h.tanh().powi(2)
}

/// Zero-weight sector at `q = e^h`, signs continuous from `q = 1`.
fn zero_sector(spec: &SeriesSpec, h: f64) -> Result<Vec<Entry>> {
    let mut raw = zero_sector_raw(spec, h);
    let reference = zero_sector_raw(spec, 0.0);
    for ((tag, v), (_, r)) in raw.iter_mut().zip(&reference) {
        let overlap = v.dot(r);
        if overlap.abs() < SIGN_THRESHOLD {
            return Err(Error::SignAmbiguity {
                label: tag.to_string(),
                overlap,
            });
        }
        if overlap < 0.0 {
            v.neg_mut();
        }
    }
    if spec.series() == Series::D {
        let pos = |k: i32| {
            raw.iter()
                .position(|(t, _)| *t == ClosedTag::NMinus { k: HalfInt::from_int(k) })
                .expect("D has n−(0) and n−(1)")
        };
        let (p0, p1) = (pos(0), pos(1));
        let (c, s) = (d_centre_angle(h).cos(), d_centre_angle(h).sin());
        let n0 = raw[p0].1.clone();
        let n1 = raw[p1].1.clone();
        raw[p0].1 = &n0 * c + &n1 * s;
        raw[p1].1 = &n1 * c - &n0 * s;
    }
    Ok(raw)
}

/// Vectors `|ii⟩`, `|ij±⟩` outside the zero-weight sector; `h = None` is
/// `q = 0`.
fn pair_sector(spec: &SeriesSpec, h: Option<f64>) -> Vec<Entry> {
    let n = spec.n();
    let ortho = spec.is_orthosymplectic();
    let sec = Sector { n, h: 0.0 };
    let (a, b) = match h {
        None => (0.0, 1.0),
        Some(h) => {
            // a = √q/√(q+q⁻¹), b = √q⁻¹/√(q+q⁻¹)
            let q2 = (2.0 * h).exp();
            (1.0 / (1.0 + 1.0 / q2).sqrt(), 1.0 / (1.0 + q2).sqrt())
        }
    };
    let mut out = Vec::new();
    for i in 1..=n {
        if !(ortho && sec.bar(i) == i) {
            let mut v = sec.zero();
            sec.add(&mut v, i, i, 1.0);
            out.push((ClosedTag::Diagonal { i }, v));
        }
        for j in i + 1..=n {
            if ortho && j == sec.bar(i) {
                continue;
            }
            let mut plus = sec.zero();
            sec.add(&mut plus, i, j, a);
            sec.add(&mut plus, j, i, b);
            out.push((ClosedTag::SymPair { i, j }, plus));
            let mut minus = sec.zero();
            sec.add(&mut minus, i, j, b);
            sec.add(&mut minus, j, i, -a);
            out.push((ClosedTag::AntiPair { i, j }, minus));
        }
    }
    out
}

fn label_for(spec: &SeriesSpec, table: &WeightTable, tag: ClosedTag) -> BasisLabel {
    let n = spec.n();
    let at = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let (weight, tiebreak) = match &tag {
        ClosedTag::Diagonal { i } => (table.total(&[i - 1, i - 1]), at(*i, *i)),
        ClosedTag::SymPair { i, j } | ClosedTag::AntiPair { i, j } => {
            (table.total(&[i - 1, j - 1]), at(*i, *j))
        }
        ClosedTag::NPlus { k } | ClosedTag::NMinus { k } => {
            let a = (spec.s().as_f64() - k.as_f64()).round() as usize;
            (table.total(&[0, n - 1]), at(a, n + 1 - a))
        }
        ClosedTag::Trace => (table.total(&[0, n - 1]), at(1, n)),
    };
    BasisLabel {
        weight,
        key: LabelKey::Closed(tag),
        tiebreak,
    }
}

fn into_basis(spec: &SeriesSpec, q: QParam, entries: Vec<Entry>) -> Result<LabeledBasis> {
    let table = WeightTable::new(spec);
    let n = spec.n();
    let labeled = entries
        .into_iter()
        .map(|(tag, v)| (label_for(spec, &table, tag), v))
        .collect();
    let basis = LabeledBasis::new(*spec, q, n * n, labeled)?;
    let defect = basis.gram_defect();
    if defect > 1e-11 {
        return Err(Error::InternalConsistency(format!(
            "closed-form basis of {spec} at q = {q} has Gram defect {defect:e}"
        )));
    }
    Ok(basis)
}

/// Closed-form natural basis for any series. At `q = 0` this is the crystal
/// basis with each sign chosen to continue the small-`q` closed form.
pub fn closed_basis(spec: &SeriesSpec, q: QParam) -> Result<LabeledBasis> {
    if q.kind() == QKind::Zero {
        let crystal = crystal_basis(spec)?;
        let probe = closed_basis(spec, QParam::new(CRYSTAL_SIGN_PROBE)?)?;
        let entries = crystal
            .labels
            .iter()
            .zip(&crystal.vectors)
            .map(|(label, v)| {
                let p = probe.vector(label).ok_or(Error::LabelMismatch)?;
                let overlap = p.dot(v);
                if overlap.abs() < SIGN_THRESHOLD {
                    return Err(Error::SignAmbiguity {
                        label: label.to_string(),
                        overlap,
                    });
                }
                Ok((label.clone(), if overlap < 0.0 { -v } else { v.clone() }))
            })
            .collect::<Result<Vec<_>>>()?;
        return LabeledBasis::new(*spec, q, crystal.dim, entries);
    }
    let h = q.h().expect("positive q");
    let mut entries = pair_sector(spec, Some(h));
    if spec.is_orthosymplectic() {
        entries.extend(zero_sector(spec, h)?);
    }
    into_basis(spec, q, entries)
}

/// Closed forms for `sl(n)`.
pub fn su_closed_basis(n: usize, q: QParam) -> Result<LabeledBasis> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("sl({n})")));
    }
    closed_basis(&SeriesSpec::new(Series::A, n - 1)?, q)
}

/// Closed forms for the orthogonal and symplectic series.
pub fn bcd_closed_basis(spec: &SeriesSpec, q: QParam) -> Result<LabeledBasis> {
    if !spec.is_orthosymplectic() {
        return Err(Error::InvalidSpec(spec.to_string()));
    }
    closed_basis(spec, q)
}

/// The crystal basis: every vector a signed product vector.
pub fn crystal_basis(spec: &SeriesSpec) -> Result<LabeledBasis> {
    let n = spec.n();
    let sec = Sector { n, h: 0.0 };
    let mut entries = pair_sector(spec, None);
    if spec.is_orthosymplectic() {
        let s = spec.s().as_f64();
        let minus_sign = if spec.series() == Series::C { -1.0 } else { 1.0 };
        for (tag, _) in zero_sector_raw(spec, 0.0) {
            let mut v = sec.zero();
            match tag {
                ClosedTag::NPlus { k } => {
                    let a = (s - k.as_f64()).round() as usize;
                    sec.add(&mut v, sec.bar(a), a, 1.0);
                }
                ClosedTag::NMinus { k } => {
                    let a = (s - k.as_f64() + 1.0).round() as usize;
                    sec.add(&mut v, a, sec.bar(a), minus_sign);
                }
                ClosedTag::Trace => sec.add(&mut v, 1, n, 1.0),
                _ => unreachable!("zero sector holds n± and trace only"),
            }
            entries.push((tag, v));
        }
    }
    into_basis(spec, QParam::ZERO, entries)
}
