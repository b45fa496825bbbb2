//! Numerical laboratory for the Dirichlet problem
//! `-sum_m div(a_m A(x) grad u^m) = lambda f` on intervals and rectangles.
//!
//! * [`series`]: coefficient sequences, radius of convergence, the boundary
//!   sum `K` and the partial sums `Q_n` with their inverses.
//! * [`elliptic`]: grids, diagonal coefficient fields, the flux-form
//!   stencil and a conjugate gradient solver.
//! * [`spectral`]: the principal weighted eigenpair.
//! * [`analysis`]: existence and nonexistence thresholds and verdicts.
//! * [`pipeline`]: approximating solutions, weak residuals, flat zones.
//! * [`config`] and [`cli`]: the file-driven command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod pipeline;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
