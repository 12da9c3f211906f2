//! Spectra of the Laplace–Beltrami operator for radially symmetric conformal
//! metrics `p(r)·(dx² + dy²)` on the unit disc.
//!
//! Separation of variables reduces the eigenproblem to one singular
//! Sturm–Liouville problem per angular mode `k`. [`sl_solver`] discretizes each
//! mode in the area coordinate `z ∈ [0,1]`, where the mass weight is constant;
//! [`shooting`] recomputes the same eigenvalues by Prüfer-angle shooting in the
//! radius as an independent check. [`spectrum`] merges the modes into the 2D
//! spectrum, [`analysis`] reads nodal circles and hot spots off the
//! eigenfunctions, and [`heat`] evolves the heat equation on the weighted disc.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` is the NaN-rejecting test throughout
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod heat;
pub mod metric;
pub mod quadrature;
pub mod shooting;
pub mod sl_solver;
pub mod spectrum;
mod spline;
pub mod tridiag;

pub use error::{Error, Result};
pub use metric::{MetricKind, MetricSpec};
pub use sl_solver::{BoundaryCondition, EigenPair, ModeProblem};
