//! Exact Siegel theta series of even lattices and the action of degree-n
//! Hecke operators at good primes on their Fourier coefficients.

#![allow(clippy::needless_range_loop)]

pub mod closed;
pub mod error;
pub mod fourier;
pub mod fq;
pub mod hecke;
pub mod identities;
pub mod lattice;
pub mod qanalog;
pub mod qsums;

pub use error::{Error, Result};
pub use fourier::{CoefficientSource, FourierMap, SeriesMeta};
pub use qanalog::Rational;
