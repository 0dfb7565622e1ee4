//! Numerical toolkit for the two-component coupled nonlinear Schrödinger
//! system with linear (`κ uv`) and nonlinear (`β |u|^{p/2}|v|^{p/2}`)
//! couplings, reduced to radial (or full-line, `N = 1`) grids.
//!
//! Module map:
//! - [`grid`]: truncated radial meshes, quadrature, the discrete Laplacian.
//! - [`soliton`]: the scalar soliton `−Δw + w = w³`.
//! - [`energy`]: the energy functional, its gradient and the Nehari projection.
//! - [`ground_state`]: Nehari-projected descent, synchronized solutions, κ₀ continuation.
//! - [`spectrum`]: linearization at synchronized solutions and nondegeneracy.
//! - [`analysis`]: barycenter, comparison criteria, translated paths and thresholds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod energy;
pub mod error;
pub mod grid;
pub mod ground_state;
pub mod soliton;
pub mod spectrum;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{make_grid, GridKind, RadialGrid, ScalarField};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
