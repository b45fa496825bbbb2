use super::gridfn::GridFunction;
use super::operator::SparseOperator;
use crate::error::{Error, Result};

/// Conjugate-gradient settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Target relative residual `|A v - b| / |b|`.
    pub tol: f64,
    /// Iteration cap; `None` means `10 * n_interior`.
    pub max_iter: Option<usize>,
    /// Diagonal (Jacobi) preconditioning.
    pub jacobi: bool,
}

impl CgOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_iter: None,
            jacobi: false,
        }
    }
}

impl Default for CgOptions {
    fn default() -> Self {
        Self::new(1e-12)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A_h v = rhs` on the interior, zero start, zero boundary.
pub fn solve_linear(op: &SparseOperator, rhs: &GridFunction, tol: f64) -> Result<GridFunction> {
    solve_linear_with(op, rhs, &CgOptions::new(tol)).map(|(v, _)| v)
}

pub fn solve_linear_with(
    op: &SparseOperator,
    rhs: &GridFunction,
    opts: &CgOptions,
) -> Result<(GridFunction, CgStats)> {
    op.check_grid(rhs)?;
    let b = rhs.interior_values();
    let (x, stats) = cg_interior(op, &b, opts)?;
    Ok((GridFunction::from_interior(op.grid(), &x), stats))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain sequential CG on interior vectors; reductions run in index order so
/// results are reproducible bit for bit.
pub(crate) fn cg_interior(
    op: &SparseOperator,
    b: &[f64],
    opts: &CgOptions,
) -> Result<(Vec<f64>, CgStats)> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!(
            "linear tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let n = b.len();
    let a = op.matrix();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((
            x,
            CgStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let inv_diag: Option<Vec<f64>> = opts
        .jacobi
        .then(|| a.diagonal().iter().map(|d| 1.0 / d).collect());
    let precond = |r: &[f64], z: &mut Vec<f64>| match &inv_diag {
        Some(d) => {
            z.clear();
            z.extend(r.iter().zip(d).map(|(ri, di)| ri * di));
        }
        None => {
            z.clear();
            z.extend_from_slice(r);
        }
    };

    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let mut r = b.to_vec();
    let mut z = Vec::with_capacity(n);
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let target = opts.tol * b_norm;

    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let r_norm = dot(&r, &r).sqrt();
        if r_norm <= target {
            // Confirm against the true residual.
            let ax = a.mul_vec(&x);
            let true_res = ax
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            if true_res <= target {
                return Ok((
                    x,
                    CgStats {
                        iterations: it,
                        relative_residual: true_res / b_norm,
                    },
                ));
            }
            // Recursive residual drifted; restart from the true residual.
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
            precond(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        what: "conjugate gradient",
        iterations: max_iter,
    })
}
