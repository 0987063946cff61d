//! Explicit matrix representations of the Drinfel'd twist `F` relating the
//! classical and q-deformed tensor-product structures of the defining
//! representations of the classical series A, B, C and D.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] – series data, Cartan generators and exact weights.
//! * [`linops`] – dense real linear algebra on tensor products.
//! * [`rmatrices`] – deformed R-matrices, `Q̄ = R̄₂₁R̄₁₂` and the classical
//!   exponent model `Q = Σ q^ℓ P`.
//! * [`twist`] – labeled natural bases `|a;q⟩`, closed forms, crystal bases and
//!   interval twists `F^{[q′q]}`.
//! * [`coassoc`] – triple tensor products, the coassociator `Φ` and the Racah
//!   coboundary.
//! * [`verify`] – the identity suite producing a [`verify::VerificationReport`].

pub mod algebra;
pub mod coassoc;
mod error;
pub mod linops;
pub mod rmatrices;
pub mod twist;
pub mod verify;

pub use algebra::{HalfInt, Series, SeriesSpec, Weight};
pub use error::{Error, Result};
pub use linops::DenseMatrix;
pub use rmatrices::{QKind, QParam, SpectralModel};
pub use twist::{BasisLabel, FMatrix, LabeledBasis};
