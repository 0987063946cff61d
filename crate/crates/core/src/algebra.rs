//! Classical Lie series data: defining dimension, Cartan generators and the
//! exact weights of the standard basis vectors.
//!
//! Basis indices are 1-based throughout this module, matching the usual
//! `e₁ … eₙ` labelling; everything downstream uses 0-based storage.

use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::DenseMatrix;

/// An exact half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_int(v: i32) -> Self {
        HalfInt(2 * v)
    }

    /// Builds `twice / 2`.
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A weight vector: joint eigenvalues of the Cartan generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<HalfInt>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![HalfInt::ZERO; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == HalfInt::ZERO)
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.0.len(), rhs.0.len());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| *a + *b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|c| -*c).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
}

/// A classical series together with its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesSpec {
    series: Series,
    rank: usize,
}

impl SeriesSpec {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let spec = SeriesSpec { series, rank };
        let ok = match series {
            Series::D => rank >= 2,
            _ => rank >= 1,
        };
        if ok {
            Ok(spec)
        } else {
            Err(Error::InvalidSpec(spec.to_string()))
        }
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the defining representation.
    pub fn n(&self) -> usize {
        match self.series {
            Series::A => self.rank + 1,
            Series::B => 2 * self.rank + 1,
            Series::C | Series::D => 2 * self.rank,
        }
    }

    /// The series parameter `s`: `n/2` for B and D, `n/2 + 1` for C, and
    /// `n/2` for A where it plays no role.
    pub fn s(&self) -> HalfInt {
        let n = self.n() as i32;
        match self.series {
            Series::C => HalfInt::from_twice(n + 2),
            _ => HalfInt::from_twice(n),
        }
    }

    pub fn is_orthosymplectic(&self) -> bool {
        self.series != Series::A
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.series {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
        };
        write!(f, "{letter}{}", self.rank)
    }
}

impl FromStr for SeriesSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let series = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Series::A,
            Some('B') => Series::B,
            Some('C') => Series::C,
            Some('D') => Series::D,
            _ => return Err(bad()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let rank: usize = digits.parse().map_err(|_| bad())?;
        SeriesSpec::new(series, rank).map_err(|_| bad())
    }
}

/// `ī = n + 1 − i` on 1-based indices.
pub fn conjugate_index(i: usize, n: usize) -> Result<usize> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    Ok(n + 1 - i)
}

/// Diagonal entries (1-based index `i`) of the Cartan generator number `c`.
fn cartan_entry(spec: &SeriesSpec, c: usize, i: usize) -> i32 {
    let n = spec.n();
    match spec.series {
        // Hc = E_cc − E_{c+1,c+1}
        Series::A => i32::from(i == c) - i32::from(i == c + 1),
        // Hc = E_cc − E_{c̄c̄}
        _ => {
            let cbar = n + 1 - c;
            i32::from(i == c) - i32::from(i == cbar)
        }
    }
}

/// Rank-many commuting diagonal `n×n` Cartan generators.
pub fn cartan_generators(spec: &SeriesSpec) -> Vec<DenseMatrix> {
    let n = spec.n();
    (1..=spec.rank)
        .map(|c| {
            DenseMatrix::from_fn(n, n, |r, col| {
                if r == col {
                    f64::from(cartan_entry(spec, c, r + 1))
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// The exact weight of `e_i` (1-based).
pub fn weight_of(spec: &SeriesSpec, i: usize) -> Result<Weight> {
    let n = spec.n();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    Ok(Weight(
        (1..=spec.rank)
            .map(|c| HalfInt::from_int(cartan_entry(spec, c, i)))
            .collect(),
    ))
}

/// Weights of all standard basis vectors, indexed 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub weights: Vec<Weight>,
}

impl WeightTable {
    pub fn new(spec: &SeriesSpec) -> Self {
        let weights = (1..=spec.n())
            .map(|i| weight_of(spec, i).expect("index in range"))
            .collect();
        WeightTable { weights }
    }

    /// Total weight of a product basis vector given by 0-based factor indices.
    pub fn total(&self, factors: &[usize]) -> Weight {
        let rank = self.weights[0].0.len();
        factors
            .iter()
            .fold(Weight::zero(rank), |acc, &f| &acc + &self.weights[f])
    }
}
