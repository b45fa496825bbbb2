//! Coefficient sequences `{a(m)}` and the power series they generate.
//!
//! The series `Q(s) = sum a(m) s^m` drives everything downstream: its radius
//! of convergence `sigma` caps every solution, the boundary sum
//! `K = Q(sigma)` separates existence for all data from nonexistence for
//! large data, and the partial sums `Q_n` give the approximating solutions
//! `u_n = Q_n^{-1}(v)`.

mod boundary;
mod full;
mod partial;
mod radius;
mod sequence;

pub use boundary::{boundary_sum, BoundarySum, Certificate, DIVERGENCE_CEILING};
pub use full::{q_derivative, q_full, DEFAULT_RADIUS_CUTOFF, MAX_TERMS};
pub use partial::{q_partial, q_partial_inverse, PartialSum, DEFAULT_INVERSE_MAX_ITER};
pub use radius::{radius_of_convergence, RadiusEstimate, SigmaMethod, MIN_WINDOW_CUTOFF};
pub use sequence::{make_sequence, CoefficientSequence, LnCoefficientFn, SequenceKind, TailRule};

use crate::error::Result;

/// Default truncation for radius and boundary-sum computations.
pub const DEFAULT_M_MAX: usize = 100_000;

/// Radius and boundary-sum diagnostics for one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesProfile {
    pub sigma: RadiusEstimate,
    pub k: BoundarySum,
    pub m_max: usize,
    pub tol: f64,
}

impl SeriesProfile {
    /// `sigma = 0` short-circuits to `K = 0`, `sigma = +inf` to a divergent
    /// `K`; otherwise `K` comes from [`boundary_sum`].
    pub fn compute(seq: &CoefficientSequence, m_max: usize, tol: f64) -> Result<Self> {
        let sigma = radius_of_convergence(seq, m_max);
        let k = if sigma.sigma == 0.0 {
            BoundarySum::Finite {
                value: 0.0,
                tail_bound: 0.0,
                certificate: Certificate::ZeroRadius,
            }
        } else if sigma.sigma.is_infinite() {
            BoundarySum::Divergent {
                partial_sum: f64::INFINITY,
                cutoff: 0,
                certificate: Certificate::InfiniteRadius,
            }
        } else {
            boundary_sum(seq, sigma.sigma, tol, m_max)?
        };
        Ok(Self {
            sigma,
            k,
            m_max,
            tol,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.sigma
    }

    /// `Some(K)` when the boundary sum is certified finite and `sigma > 0`.
    pub fn k_finite(&self) -> Option<f64> {
        if self.sigma.sigma > 0.0 {
            self.k.finite_value()
        } else {
            None
        }
    }
}
