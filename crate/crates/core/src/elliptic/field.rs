use super::grid::Grid;
use crate::error::{Error, Result};

/// Diagonal diffusion tensor `diag(a1(x), a2(x))` sampled at the nodes,
/// together with its ellipticity bounds `alpha <= a_i(x) <= beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    axes: Vec<Vec<f64>>,
    alpha: f64,
    beta: f64,
}

impl CoefficientField {
    /// Takes one nodal vector per axis. Bounds are checked by
    /// [`CoefficientField::check`] (and again at assembly).
    pub fn new(axes: Vec<Vec<f64>>, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta && beta.is_finite()) {
            return Err(Error::Config(format!(
                "ellipticity bounds need 0 < alpha <= beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { axes, alpha, beta })
    }

    /// Identity-scaled field `a_i(x) = value`.
    pub fn constant(grid: &Grid, value: f64) -> Result<Self> {
        Self::new(
            vec![vec![value; grid.node_count()]; grid.dim()],
            value,
            value,
        )
    }

    /// Same scalar field on every axis, sampled from `f`.
    pub fn isotropic(
        grid: &Grid,
        alpha: f64,
        beta: f64,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let vals: Vec<f64> = (0..grid.node_count())
            .map(|n| f(&grid.node_coords(n)))
            .collect();
        Self::new(vec![vals; grid.dim()], alpha, beta)
    }

    /// Per-axis field sampled from `f(axis, coords)`.
    pub fn from_fn(
        grid: &Grid,
        alpha: f64,
        beta: f64,
        f: impl Fn(usize, &[f64]) -> f64,
    ) -> Result<Self> {
        let axes = (0..grid.dim())
            .map(|a| {
                (0..grid.node_count())
                    .map(|n| f(a, &grid.node_coords(n)))
                    .collect()
            })
            .collect();
        Self::new(axes, alpha, beta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn axis(&self, axis: usize) -> &[f64] {
        &self.axes[axis]
    }

    /// Verifies shape against `grid` and the bound `alpha <= a <= beta` at
    /// every node.
    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.axes.len() != grid.dim() || self.axes.iter().any(|a| a.len() != grid.node_count()) {
            return Err(Error::GridMismatch(
                "coefficient field shape does not match the grid".into(),
            ));
        }
        for vals in &self.axes {
            for (node, &value) in vals.iter().enumerate() {
                if !(value >= self.alpha && value <= self.beta) {
                    return Err(Error::Ellipticity {
                        node,
                        value,
                        alpha: self.alpha,
                        beta: self.beta,
                    });
                }
            }
        }
        Ok(())
    }

    /// Restriction by injection onto the grid with half the cells.
    pub(crate) fn restricted(&self, fine: &Grid, coarse: &Grid) -> Self {
        let axes = self
            .axes
            .iter()
            .map(|vals| restrict(vals, fine, coarse))
            .collect();
        Self {
            axes,
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

pub(crate) fn restrict(vals: &[f64], fine: &Grid, coarse: &Grid) -> Vec<f64> {
    (0..coarse.node_count())
        .map(|n| {
            let (i, j) = coarse.node_ij(n);
            vals[fine.node_index(2 * i, 2 * j)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{build_grid, DomainSpec};

    #[test]
    fn bounds_scan() {
        let g = build_grid(&DomainSpec::unit_interval(8)).unwrap();
        let ok = CoefficientField::isotropic(&g, 1.0, 2.0, |x| 1.0 + x[0]).unwrap();
        ok.check(&g).unwrap();
        let bad = CoefficientField::isotropic(&g, 1.0, 1.5, |x| 1.0 + x[0]).unwrap();
        assert!(matches!(bad.check(&g), Err(Error::Ellipticity { .. })));
    }

    #[test]
    fn invalid_bounds() {
        assert!(CoefficientField::new(vec![], 0.0, 1.0).is_err());
        assert!(CoefficientField::new(vec![], 2.0, 1.0).is_err());
    }
}
