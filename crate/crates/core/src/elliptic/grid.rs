use crate::error::{Error, Result};

/// Minimum number of cells per axis (at least three interior nodes).
pub const MIN_CELLS: usize = 4;

/// Extents and resolution of an interval or rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub extents: Vec<(f64, f64)>,
    pub n_cells: Vec<usize>,
}

impl DomainSpec {
    pub fn interval(a: f64, b: f64, n: usize) -> Self {
        Self {
            extents: vec![(a, b)],
            n_cells: vec![n],
        }
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Self {
        Self {
            extents: vec![x, y],
            n_cells: vec![nx, ny],
        }
    }

    pub fn unit_interval(n: usize) -> Self {
        Self::interval(0.0, 1.0, n)
    }

    pub fn unit_square(n: usize) -> Self {
        Self::rectangle((0.0, 1.0), (0.0, 1.0), n, n)
    }
}

/// Uniform tensor grid on an interval (dim 1) or rectangle (dim 2).
///
/// Nodes are numbered row-major by y then x: node `(i, j)` has index
/// `j * (nx + 1) + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    n_cells: [usize; 2],
    h: [f64; 2],
}

pub fn build_grid(spec: &DomainSpec) -> Result<Grid> {
    Grid::new(spec)
}

impl Grid {
    pub fn new(spec: &DomainSpec) -> Result<Self> {
        let dim = spec.extents.len();
        if !(dim == 1 || dim == 2) || spec.n_cells.len() != dim {
            return Err(Error::Config(format!(
                "domain must be 1D or 2D with one cell count per axis (got {} extents, {} counts)",
                dim,
                spec.n_cells.len()
            )));
        }
        let mut lower = [0.0; 2];
        let mut upper = [0.0; 2];
        let mut n_cells = [0; 2];
        let mut h = [0.0; 2];
        for axis in 0..dim {
            let (a, b) = spec.extents[axis];
            let n = spec.n_cells[axis];
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::Config(format!(
                    "degenerate extent ({a}, {b}) on axis {axis}"
                )));
            }
            if n < MIN_CELLS {
                return Err(Error::Config(format!(
                    "n_cells = {n} on axis {axis}; need at least {MIN_CELLS}"
                )));
            }
            lower[axis] = a;
            upper[axis] = b;
            n_cells[axis] = n;
            h[axis] = (b - a) / n as f64;
        }
        Ok(Self {
            dim,
            lower,
            upper,
            n_cells,
            h,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cells(&self, axis: usize) -> usize {
        self.n_cells[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn extent(&self, axis: usize) -> (f64, f64) {
        (self.lower[axis], self.upper[axis])
    }

    /// Nodes per axis (`n_cells + 1`); 1 for the unused axis in 1D.
    pub fn nodes_along(&self, axis: usize) -> usize {
        if axis < self.dim {
            self.n_cells[axis] + 1
        } else {
            1
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes_along(0) * self.nodes_along(1)
    }

    pub fn interior_count(&self) -> usize {
        (0..self.dim).map(|a| self.n_cells[a] - 1).product()
    }

    /// Volume attached to each node: `h` in 1D, `hx * hy` in 2D.
    pub fn cell_volume(&self) -> f64 {
        self.h[..self.dim].iter().product()
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.nodes_along(0) + i
    }

    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        let nx = self.nodes_along(0);
        (node % nx, node / nx)
    }

    /// Coordinate along `axis` of grid line `i`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i == self.n_cells[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.h[axis]
        }
    }

    /// Coordinates of a node (length `dim`).
    pub fn node_coords(&self, node: usize) -> Vec<f64> {
        let (i, j) = self.node_ij(node);
        if self.dim == 1 {
            vec![self.coord(0, i)]
        } else {
            vec![self.coord(0, i), self.coord(1, j)]
        }
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = self.node_ij(node);
        let on_x = i == 0 || i == self.n_cells[0];
        if self.dim == 1 {
            on_x
        } else {
            on_x || j == 0 || j == self.n_cells[1]
        }
    }

    /// Interior position of a node, if it is interior.
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        if self.is_boundary(node) {
            return None;
        }
        let (i, j) = self.node_ij(node);
        if self.dim == 1 {
            Some(i - 1)
        } else {
            Some((j - 1) * (self.n_cells[0] - 1) + (i - 1))
        }
    }

    /// Node index of the `k`-th interior node.
    pub fn interior_node(&self, k: usize) -> usize {
        if self.dim == 1 {
            k + 1
        } else {
            let nxi = self.n_cells[0] - 1;
            self.node_index(k % nxi + 1, k / nxi + 1)
        }
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.interior_count())
            .map(|k| self.interior_node(k))
            .collect()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&n| self.is_boundary(n))
            .collect()
    }

    /// The grid with half as many cells per axis, when every count is even
    /// and the result still has [`MIN_CELLS`] cells per axis.
    pub fn coarsened(&self) -> Option<Grid> {
        let mut spec = DomainSpec {
            extents: Vec::new(),
            n_cells: Vec::new(),
        };
        for axis in 0..self.dim {
            let n = self.n_cells[axis];
            if !n.is_multiple_of(2) || n / 2 < MIN_CELLS {
                return None;
            }
            spec.extents.push((self.lower[axis], self.upper[axis]));
            spec.n_cells.push(n / 2);
        }
        Grid::new(&spec).ok()
    }
}
