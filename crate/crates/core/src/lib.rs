//! Adaptive P1 finite elements for the 2D obstacle problem with
//! inhomogeneous Dirichlet data.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the whole numerical
//! pipeline of the adaptive loop:
//!
//! - [`mesh`]: conforming triangulations and newest vertex bisection,
//! - [`fem`]: stiffness and load assembly, energies, prolongation,
//! - [`boundary`]: nodal interpolation of Dirichlet data and the `apx` oscillations,
//! - [`obstacle`]: primal-dual active set and projected SOR solvers,
//! - [`estimator`]: the residual estimator built from edge contributions,
//! - [`adapt`]: Dörfler marking and the solve/estimate/mark/refine loop,
//! - [`problems`]: problem data, the zero-obstacle shift and the two benchmark problems.
//!
//! File formats, timing and the command line live in the `afem` companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adapt;
pub mod boundary;
pub mod estimator;
pub mod fem;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod obstacle;
pub mod problems;
pub mod quadrature;
pub mod rates;

mod error;

pub use error::{Error, Result};
pub use geometry::Point;
