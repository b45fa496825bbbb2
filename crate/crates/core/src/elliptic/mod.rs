//! Grids, diagonal coefficient fields, the flux-form discretisation of
//! `-div(A(x) grad .)` with homogeneous Dirichlet data, and a conjugate
//! gradient solver for the linear problem `-div(A grad v) = f`.

mod cg;
mod field;
mod grid;
mod gridfn;
mod operator;

pub use cg::{solve_linear, solve_linear_with, CgOptions, CgStats};
pub use field::CoefficientField;
pub use grid::{build_grid, DomainSpec, Grid, MIN_CELLS};
pub use gridfn::GridFunction;
pub use operator::{assemble_operator, CsrMatrix, Face, SparseOperator};

pub(crate) use cg::cg_interior;
pub(crate) use gridfn::fmt_num;

use crate::error::{Error, Result};

/// Predefined nodal data families.
#[derive(Clone, Debug, PartialEq)]
pub enum DataFamily {
    Constant(f64),
    /// `amplitude * exp(-|x - center|^2 / width^2)`.
    Bump {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
}

impl DataFamily {
    pub fn evaluate(&self, grid: &Grid) -> Result<GridFunction> {
        match self {
            DataFamily::Constant(c) => Ok(GridFunction::constant(grid, *c)),
            DataFamily::Bump {
                center,
                width,
                amplitude,
            } => {
                if center.len() != grid.dim() || !(*width > 0.0) {
                    return Err(Error::Config(format!(
                        "bump needs a {}-component center and positive width",
                        grid.dim()
                    )));
                }
                Ok(GridFunction::from_fn(grid, |x| {
                    let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                    amplitude * (-r2 / (width * width)).exp()
                }))
            }
        }
    }
}

/// `-div(A grad .)` on a grid with load `lambda * f`.
#[derive(Clone, Debug)]
pub struct EllipticProblem {
    grid: Grid,
    field: CoefficientField,
    f: GridFunction,
    lambda: f64,
}

impl EllipticProblem {
    /// Rejects negative data, nonpositive `lambda` and mismatched shapes.
    /// A vanishing datum is accepted here; operations that need `f != 0`
    /// (the weighted eigenproblem) reject it themselves.
    pub fn new(grid: Grid, field: CoefficientField, f: GridFunction, lambda: f64) -> Result<Self> {
        if f.grid() != &grid {
            return Err(Error::GridMismatch(
                "datum lives on a different grid".into(),
            ));
        }
        if let Some((node, v)) = f
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidWeight(format!(
                "datum must be finite and nonnegative; f = {v} at node {node}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        field.check(&grid)?;
        Ok(Self {
            grid,
            field,
            f,
            lambda,
        })
    }

    /// Unit-coefficient problem on `(0,1)` or `(0,1)^2` with constant datum.
    pub fn unit_constant(dim: usize, n: usize, f: f64, lambda: f64) -> Result<Self> {
        let spec = if dim == 1 {
            DomainSpec::unit_interval(n)
        } else {
            DomainSpec::unit_square(n)
        };
        let grid = build_grid(&spec)?;
        let field = CoefficientField::constant(&grid, 1.0)?;
        let datum = GridFunction::constant(&grid, f);
        Self::new(grid, field, datum, lambda)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    /// The unscaled datum `f`.
    pub fn f(&self) -> &GridFunction {
        &self.f
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The load `lambda * f`.
    pub fn load(&self) -> GridFunction {
        self.f.scaled(self.lambda)
    }

    /// True when `f` vanishes at every interior node.
    pub fn datum_is_zero(&self) -> bool {
        self.f.interior_values().iter().all(|&v| v == 0.0)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.field.clone(),
            self.f.clone(),
            lambda,
        )
    }

    pub fn with_datum(&self, f: GridFunction) -> Result<Self> {
        Self::new(self.grid.clone(), self.field.clone(), f, self.lambda)
    }

    pub fn operator(&self) -> Result<SparseOperator> {
        assemble_operator(&self.grid, &self.field)
    }

    /// Same problem on the grid with half the cells (datum and field
    /// restricted by injection), when that grid exists.
    pub fn coarsened(&self) -> Option<Self> {
        let coarse = self.grid.coarsened()?;
        let field = self.field.restricted(&self.grid, &coarse);
        let f = GridFunction::new(
            coarse.clone(),
            field::restrict(self.f.values(), &self.grid, &coarse),
        )
        .ok()?;
        Self::new(coarse, field, f, self.lambda).ok()
    }
}
