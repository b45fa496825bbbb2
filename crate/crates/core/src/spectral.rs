//! Principal eigenpair of the weighted problem `-div(A grad phi) = lambda f phi`.
//!
//! Both sides of the discrete pencil carry the same cell-volume factor, so
//! `A_h phi = lambda diag(f) phi` in nodal form; the Rayleigh quotient is
//! `(w . A_h w) / (sum f w^2)` over interior nodes, equivalently the ratio of
//! the discrete energy to `sum f w^2 cellvol`.

use crate::elliptic::{cg_interior, CgOptions, GridFunction, SparseOperator};
use crate::error::{Error, Result};

/// Default cap on outer inverse-iteration steps.
pub const DEFAULT_EIG_MAX_ITER: usize = 500;

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda1: f64,
    /// Positive in the interior, normalised by `sum f phi^2 cellvol = 1`.
    pub phi1: GridFunction,
    /// `|A_h phi - lambda f phi| / |A_h phi|` (Euclidean, interior).
    pub residual: f64,
    /// Rayleigh quotient of the returned `phi1`.
    pub rayleigh: f64,
    pub iterations: usize,
    /// Unweighted sup of `phi1`.
    pub phi_sup: f64,
}

fn check_weight(op: &SparseOperator, f: &GridFunction) -> Result<Vec<f64>> {
    if f.grid() != op.grid() {
        return Err(Error::GridMismatch(
            "weight lives on a different grid than the operator".into(),
        ));
    }
    let w = f.interior_values();
    if let Some(v) = w.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidWeight(format!(
            "weight must be finite and nonnegative, found {v}"
        )));
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidWeight("weight vanishes identically".into()));
    }
    Ok(w)
}

fn weighted_sq(f: &[f64], x: &[f64]) -> f64 {
    f.iter().zip(x).map(|(fi, xi)| fi * xi * xi).sum()
}

/// Inverse power iteration from the all-ones vector with CG inner solves.
/// Stops once successive eigenvalue estimates differ by at most `tol * lambda`.
pub fn principal_eigenpair(op: &SparseOperator, f: &GridFunction, tol: f64) -> Result<EigenPair> {
    principal_eigenpair_with(op, f, tol, DEFAULT_EIG_MAX_ITER)
}

pub fn principal_eigenpair_with(
    op: &SparseOperator,
    f: &GridFunction,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    let w = check_weight(op, f)?;
    let n = w.len();
    let inner = CgOptions::new((tol * 1e-2).clamp(1e-14, 1e-10));
    let mut x = vec![1.0; n];
    let mut lambda_prev = f64::INFINITY;

    for it in 1..=max_iter {
        let rhs: Vec<f64> = w.iter().zip(&x).map(|(a, b)| a * b).collect();
        let (y, _) = cg_interior(op, &rhs, &inner)?;
        let norm = weighted_sq(&w, &y).sqrt();
        x = y.iter().map(|v| v / norm).collect();
        let lambda = op.quadratic_form(&x) / weighted_sq(&w, &x);
        if (lambda - lambda_prev).abs() <= tol * lambda {
            return Ok(finish(op, &w, x, lambda, it));
        }
        lambda_prev = lambda;
    }
    Err(Error::NoConvergence {
        what: "inverse power iteration",
        iterations: max_iter,
    })
}

fn finish(
    op: &SparseOperator,
    w: &[f64],
    mut x: Vec<f64>,
    lambda: f64,
    iterations: usize,
) -> EigenPair {
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let vol = op.grid().cell_volume();
    let scale = (weighted_sq(w, &x) * vol).sqrt();
    x.iter_mut().for_each(|v| *v /= scale);
    let ax = op.apply(&x);
    let r: f64 = ax
        .iter()
        .zip(w.iter().zip(&x))
        .map(|(a, (wi, xi))| (a - lambda * wi * xi).powi(2))
        .sum::<f64>()
        .sqrt();
    let a_norm = ax.iter().map(|a| a * a).sum::<f64>().sqrt();
    let phi1 = GridFunction::from_interior(op.grid(), &x);
    let rayleigh = op.quadratic_form(&x) / weighted_sq(w, &x);
    EigenPair {
        lambda1: lambda,
        residual: r / a_norm,
        rayleigh,
        iterations,
        phi_sup: phi1.sup_norm(),
        phi1,
    }
}

/// `(w . A_h w) / sum f w^2` over interior nodes; boundary values of `w` are
/// ignored.
pub fn rayleigh_quotient(op: &SparseOperator, f: &GridFunction, w: &GridFunction) -> Result<f64> {
    if f.grid() != op.grid() || w.grid() != op.grid() {
        return Err(Error::GridMismatch(
            "rayleigh quotient inputs live on different grids".into(),
        ));
    }
    let wi = w.interior_values();
    let den = weighted_sq(&f.interior_values(), &wi);
    if !(den > 0.0) {
        return Err(Error::DegenerateWeight);
    }
    Ok(op.quadratic_form(&wi) / den)
}
