//! Exponential systems `E(Λ) = {e^{2πiλt} : λ ∈ Λ}` on finite unions of
//! intervals: exact set and spectrum models, truncated Gram certification,
//! the coset/cell matrix criterion, gated combination of Riesz bases, and
//! Paley-Wiener interpolation at fixed truncation.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod combinators;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod fourier;
pub mod gram;
pub mod linalg;
pub mod precise;
pub mod pw;
pub mod rational;
pub mod repro;
pub mod spectrum;

pub use domain::IntervalUnion;
pub use error::{Error, Result};
pub use rational::Rational;
pub use spectrum::{CosetFamily, SpectrumSpec, Window};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
