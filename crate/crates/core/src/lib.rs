//! Continuous-time quantum and classical walks on spidernet lattices.
//!
//! The walk operator of a spidernet `S(a,b,c)` restricted to the stratum
//! vectors is a Jacobi matrix whose coefficients become constant after the
//! first stratum. Everything here is built on that fact:
//!
//! - [`graph`] constructs explicit truncated lattices for ground-truth checks.
//! - [`jacobi`] holds the Jacobi data, orthogonal polynomials and the
//!   continued-fraction Stieltjes transform.
//! - [`measure`] inverts the transform into a density plus atoms and
//!   integrates against it.
//! - [`gauss`] builds Gauss rules from truncated Jacobi matrices.
//! - [`walk`] turns the measure into stratum amplitudes and probabilities.
//! - [`oracle`] evolves the full truncated graph directly, with dense
//!   eigendecompositions from [`symmetric`].
//! - [`decay`] extracts envelopes, power-law exponents and characteristic
//!   times from traces.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bessel;
pub mod decay;
mod error;
pub mod gauss;
pub mod graph;
pub mod jacobi;
pub mod measure;
pub mod oracle;
pub mod symmetric;
pub mod walk;

pub use error::{Error, ErrorKind, Result};
pub use graph::{build, stratum_sizes, SpidernetParams, StratifiedGraph, WalkOperatorKind};
pub use jacobi::{jacobi_for_spidernet, JacobiSequence};
pub use measure::{spectral_measure, Atom, Quadrature, SpectralMeasure};
pub use walk::{Flavor, Method, WalkTrace};

pub use num_complex::Complex64;
