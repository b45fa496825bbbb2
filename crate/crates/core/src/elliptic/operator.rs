use super::field::CoefficientField;
use super::grid::Grid;
use super::gridfn::GridFunction;
use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(col, value)` lists; columns are sorted and
    /// duplicates summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Exact entrywise symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, v)| self.get(c, r) == v))
    }
}

/// A face between two neighbouring nodes with its averaged coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Face {
    pub from: usize,
    pub to: usize,
    pub axis: usize,
    pub coefficient: f64,
}

/// Discrete `-div(A grad .)` on the interior nodes of a grid with
/// homogeneous Dirichlet conditions eliminated.
///
/// The matrix is the finite-difference operator (entries scale like
/// `1/h^2`), so `A_h v = f` is the nodal equation. Energy pairings multiply
/// by the cell volume to approximate `int A grad w . grad phi`.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    grid: Grid,
    matrix: CsrMatrix,
    faces: Vec<Face>,
}

/// Flux-form 3-point (1D) or 5-point (2D) stencil; face coefficients are
/// arithmetic means of the adjacent nodal values.
pub fn assemble_operator(grid: &Grid, field: &CoefficientField) -> Result<SparseOperator> {
    field.check(grid)?;
    let n = grid.interior_count();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(2 * grid.dim() + 1); n];
    let mut faces = Vec::new();

    for axis in 0..grid.dim() {
        let inv_h2 = 1.0 / (grid.spacing(axis) * grid.spacing(axis));
        let a = field.axis(axis);
        for node in 0..grid.node_count() {
            let (i, j) = grid.node_ij(node);
            let next = match axis {
                0 if i < grid.n_cells(0) => grid.node_index(i + 1, j),
                1 if j < grid.n_cells(1) => grid.node_index(i, j + 1),
                _ => continue,
            };
            let p = grid.interior_index(node);
            let q = grid.interior_index(next);
            if p.is_none() && q.is_none() {
                continue;
            }
            let k = 0.5 * (a[node] + a[next]);
            faces.push(Face {
                from: node,
                to: next,
                axis,
                coefficient: k,
            });
            let w = k * inv_h2;
            if let Some(p) = p {
                rows[p].push((p, w));
            }
            if let Some(q) = q {
                rows[q].push((q, w));
            }
            if let (Some(p), Some(q)) = (p, q) {
                rows[p].push((q, -w));
                rows[q].push((p, -w));
            }
        }
    }
    Ok(SparseOperator {
        grid: grid.clone(),
        matrix: CsrMatrix::from_rows(rows),
        faces,
    })
}

impl SparseOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn n_interior(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }

    /// `v . (A_h v)` over interior values.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let av = self.matrix.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| a * b).sum()
    }

    /// `sum_faces k (dw)(dphi) / h^2 * cellvol`: the discrete
    /// `int A grad w . grad phi`. For functions vanishing on the boundary
    /// this equals `cellvol * phi . (A_h w)`.
    pub fn energy(&self, w: &GridFunction, phi: &GridFunction) -> f64 {
        self.energy_values(w.values(), phi.values())
    }

    pub(crate) fn energy_values(&self, w: &[f64], phi: &[f64]) -> f64 {
        let vol = self.grid.cell_volume();
        let mut acc = 0.0;
        for f in &self.faces {
            let h = self.grid.spacing(f.axis);
            acc += f.coefficient * (w[f.to] - w[f.from]) * (phi[f.to] - phi[f.from]) / (h * h);
        }
        acc * vol
    }

    /// Checks the M-matrix sign pattern: positive diagonal, nonpositive
    /// off-diagonal entries.
    pub fn has_m_matrix_pattern(&self) -> bool {
        (0..self.matrix.dim()).all(|r| {
            self.matrix
                .row(r)
                .all(|(c, v)| if c == r { v > 0.0 } else { v <= 0.0 })
        })
    }

    pub(crate) fn check_grid(&self, g: &GridFunction) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(Error::GridMismatch(
                "grid function lives on a different grid than the operator".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{build_grid, DomainSpec};

    #[test]
    fn laplacian_1d_rows() {
        let g = build_grid(&DomainSpec::unit_interval(4)).unwrap();
        let op = assemble_operator(&g, &CoefficientField::constant(&g, 1.0).unwrap()).unwrap();
        let m = op.matrix();
        assert_eq!(m.get(1, 0), -16.0);
        assert_eq!(m.get(1, 1), 32.0);
        assert_eq!(m.get(1, 2), -16.0);
        assert_eq!(m.get(0, 0), 32.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert!(m.is_symmetric());
    }

    #[test]
    fn laplacian_2d_rows() {
        let g = build_grid(&DomainSpec::unit_square(4)).unwrap();
        let op = assemble_operator(&g, &CoefficientField::constant(&g, 1.0).unwrap()).unwrap();
        let m = op.matrix();
        // Centre interior node is k = 4 with neighbours 1, 3, 5, 7.
        assert_eq!(m.get(4, 4), 64.0);
        for c in [1, 3, 5, 7] {
            assert_eq!(m.get(4, c), -16.0);
        }
        assert_eq!(m.nnz(), 9 + 2 * 12);
        assert!(op.has_m_matrix_pattern());
    }

    #[test]
    fn variable_coefficient_faces() {
        // a(x) = 1 + x on 4 cells: face between x and x+h has 1 + x + h/2.
        let g = build_grid(&DomainSpec::unit_interval(4)).unwrap();
        let field = CoefficientField::isotropic(&g, 1.0, 2.0, |x| 1.0 + x[0]).unwrap();
        let op = assemble_operator(&g, &field).unwrap();
        let m = op.matrix();
        let h = 0.25;
        // Interior nodes x = .25, .5, .75 (k = 0, 1, 2).
        assert!((m.get(0, 1) + (1.0 + 0.25 + h / 2.0) / (h * h)).abs() < 1e-12);
        assert!((m.get(1, 0) + (1.0 + 0.5 - h / 2.0) / (h * h)).abs() < 1e-12);
        assert!((m.get(1, 2) + (1.0 + 0.5 + h / 2.0) / (h * h)).abs() < 1e-12);
        assert!((m.get(1, 1) - 2.0 * (1.0 + 0.5) / (h * h)).abs() < 1e-12);
        assert!((m.get(0, 0) - (1.125 + 1.375) / (h * h)).abs() < 1e-12);
    }

    #[test]
    fn ellipticity_violation() {
        let g = build_grid(&DomainSpec::unit_interval(4)).unwrap();
        let field = CoefficientField::isotropic(&g, 1.0, 1.5, |x| 1.0 + x[0]).unwrap();
        assert!(matches!(
            assemble_operator(&g, &field),
            Err(Error::Ellipticity { .. })
        ));
    }
}
