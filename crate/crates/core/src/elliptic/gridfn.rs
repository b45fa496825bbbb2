use std::io::{BufRead, Write};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Nodal values on a [`Grid`], boundary nodes included.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: vec![0.0; grid.node_count()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self {
            values: vec![value; grid.node_count()],
            grid: grid.clone(),
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|n| f(&grid.node_coords(n)))
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples `f` at interior nodes, zero on the boundary.
    pub fn from_fn_dirichlet(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|n| {
                if grid.is_boundary(n) {
                    0.0
                } else {
                    f(&grid.node_coords(n))
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Scatters interior values into a full nodal vector with zero boundary.
    pub fn from_interior(grid: &Grid, interior: &[f64]) -> Self {
        debug_assert_eq!(interior.len(), grid.interior_count());
        let mut values = vec![0.0; grid.node_count()];
        for (k, &v) in interior.iter().enumerate() {
            values[grid.interior_node(k)] = v;
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn interior_values(&self) -> Vec<f64> {
        (0..self.grid.interior_count())
            .map(|k| self.values[self.grid.interior_node(k)])
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn boundary_is_zero(&self) -> bool {
        self.grid
            .boundary_nodes()
            .iter()
            .all(|&n| self.values[n] == 0.0)
    }

    /// Largest absolute nodal value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete `|grad u|_{L^2}` from forward differences on every grid edge.
    pub fn h1_seminorm(&self) -> f64 {
        let g = &self.grid;
        let vol = g.cell_volume();
        let mut acc = 0.0;
        for axis in 0..g.dim() {
            let h = g.spacing(axis);
            for node in 0..g.node_count() {
                let (i, j) = g.node_ij(node);
                let next = match axis {
                    0 if i < g.n_cells(0) => g.node_index(i + 1, j),
                    1 if j < g.n_cells(1) => g.node_index(i, j + 1),
                    _ => continue,
                };
                let d = (self.values[next] - self.values[node]) / h;
                acc += d * d * vol;
            }
        }
        acc.sqrt()
    }

    /// `|{u >= level}|`, counted as nodes times cell volume.
    pub fn measure_above(&self, level: f64) -> f64 {
        self.values.iter().filter(|&&v| v >= level).count() as f64 * self.grid.cell_volume()
    }

    /// `max |self - other|` over all nodes.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Writes `x,value` (1D) or `x,y,value` (2D) rows, optionally preceded by
    /// a `#` comment line.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> std::io::Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        let g = &self.grid;
        if g.dim() == 1 {
            writeln!(out, "x,value")?;
        } else {
            writeln!(out, "x,y,value")?;
        }
        for node in 0..g.node_count() {
            let c = g.node_coords(node);
            for x in &c {
                write!(out, "{},", fmt_num(*x))?;
            }
            writeln!(out, "{}", fmt_num(self.values[node]))?;
        }
        Ok(())
    }

    /// Reads the CSV layout written by [`GridFunction::write_csv`], checking
    /// that the coordinates match `grid`. Lines starting with `#` are skipped.
    pub fn read_csv<R: BufRead>(grid: &Grid, input: R) -> Result<Self> {
        let expected_header = if grid.dim() == 1 {
            "x,value"
        } else {
            "x,y,value"
        };
        let mut lines = input
            .lines()
            .map(|l| l.map_err(|e| Error::Config(format!("reading grid function: {e}"))))
            .filter(|l| {
                l.as_ref()
                    .map_or(true, |s| !s.trim().is_empty() && !s.starts_with('#'))
            });
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("grid function CSV is empty".into()))??;
        if header.trim() != expected_header {
            return Err(Error::Config(format!(
                "grid function CSV header `{}`, expected `{expected_header}`",
                header.trim()
            )));
        }
        let tol = 1e-9
            * (0..grid.dim())
                .map(|a| grid.spacing(a))
                .fold(f64::INFINITY, f64::min);
        let mut values = Vec::with_capacity(grid.node_count());
        for (row, line) in lines.enumerate() {
            let line = line?;
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("grid function CSV row {}: {e}", row + 1)))?;
            if fields.len() != grid.dim() + 1 {
                return Err(Error::Config(format!(
                    "grid function CSV row {} has {} fields",
                    row + 1,
                    fields.len()
                )));
            }
            if row >= grid.node_count() {
                return Err(Error::GridMismatch(
                    "grid function CSV has too many rows".into(),
                ));
            }
            let c = grid.node_coords(row);
            if c.iter().zip(&fields).any(|(a, b)| (a - b).abs() > tol) {
                return Err(Error::GridMismatch(format!(
                    "grid function CSV row {} at {:?}, grid node at {:?}",
                    row + 1,
                    &fields[..grid.dim()],
                    c
                )));
            }
            values.push(fields[grid.dim()]);
        }
        GridFunction::new(grid.clone(), values)
    }
}

pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x:.15e}")
}
