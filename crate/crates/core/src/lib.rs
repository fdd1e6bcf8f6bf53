//! Numerical toolkit for the elliptic algebras `Q_{n,k}(eta|tau)`.
//!
//! The crate is layered bottom-up:
//!
//! - [`modcore`]: exact `SL(2,Z)` arithmetic, word decompositions and the
//!   action on `(z, eta | tau)`.
//! - [`theta`]: theta functions with characteristics and the normalized
//!   ratios `w_{(u,v)}`.
//! - [`heisenberg`]: the finite Heisenberg group, its automorphisms and their
//!   intertwiners on the standard representation.
//! - [`rmatrix`]: the elliptic R-matrix and the Yang-Baxter residual.
//! - [`algebra`]: quadratic relation spaces, graded dimensions and modular
//!   isomorphism checks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod heisenberg;
pub mod linalg;
pub mod modcore;
pub mod rmatrix;
pub mod sampling;
pub mod theta;

pub use error::{Error, Result};
