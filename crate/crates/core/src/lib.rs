//! Generalised (ladder-broken) symmetries of finite Hermitian operators.
//!
//! A Hermitian `M` is a generalised symmetry of `H` when
//! `H = H₀ + R + R†` with `[H₀, M] = 0` and `[R, M] = γR` for some `γ ≠ 0`.
//! This crate detects such pairs from iterated commutators, reconstructs the
//! decomposition, splits the spectrum of `H` into `M`-multiplets and
//! classifies the stability of each eigenvector. [`models`] builds the
//! standard examples as explicit matrices and [`pipeline`] drives the whole
//! analysis from operator files.

pub mod error;
pub mod gensym;
pub mod io;
pub mod models;
pub mod multiplets;
pub mod operator;
pub mod pipeline;
pub mod spectral;
pub mod stability;
pub mod tolerance;

pub use error::{Error, Result};
pub use operator::{Operator, C64};
pub use spectral::SpectralDecomposition;
pub use tolerance::Tolerance;
