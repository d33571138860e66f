// SPDX-License-Identifier: Apache-2.0

//! Grid quadrature, renewal-equation solver, forward Laplace transforms and
//! special functions.

mod grid;
mod laplace;
pub mod quad;
mod special;
mod volterra;

use thiserror::Error;

pub use grid::{convolve, GridFunction, TimeGrid};
pub(crate) use grid::shifted_product;
pub use laplace::{laplace_numeric, LaplaceEstimate, TailModel, TRUNCATION_TOL};
pub use special::{
    gamma, incomplete_beta, ln_gamma, mittag_leffler, mittag_leffler_aa, mittag_leffler_series,
    CompensatedSum,
};
pub use volterra::{renewal_residual, solve_renewal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("grid mismatch: expected {expected} points, found {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error("renewal marching failed at node {node}: {detail}")]
    NonConvergence { node: usize, detail: String },
    #[error("{0}")]
    InvalidArgument(String),
}
