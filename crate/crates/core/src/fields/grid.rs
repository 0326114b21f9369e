use crate::error::{Error, Result};

/// Uniform node-centred Cartesian grid on the box `[0, extent_0] x ... x [0, extent_{dim-1}]`.
///
/// Axis `a` carries `cells[a]` cells and `cells[a] + 1` nodes. Unused axes
/// (axis 2 in 2D) have one node and zero cells so loops stay uniform.
/// Node storage is row-major with the last active axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: [usize; 3],
    extent: [f64; 3],
    spacing: [f64; 3],
    shape: [usize; 3],
    strides: [usize; 3],
    boundary: Vec<bool>,
    weights: Vec<f64>,
}

pub const MIN_CELLS: usize = 8;

impl Grid {
    pub fn new(dim: usize, cells: &[usize], extent: &[f64]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if cells.len() != dim || extent.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} cell counts and extents, got {} and {}",
                cells.len(),
                extent.len()
            )));
        }
        let mut c = [0usize; 3];
        let mut e = [1.0f64; 3];
        let mut h = [1.0f64; 3];
        let mut shape = [1usize; 3];
        for a in 0..dim {
            if cells[a] < MIN_CELLS {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: {} cells, need at least {MIN_CELLS}",
                    cells[a]
                )));
            }
            if !(extent[a] > 0.0 && extent[a].is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: extent {} must be positive",
                    extent[a]
                )));
            }
            c[a] = cells[a];
            e[a] = extent[a];
            h[a] = extent[a] / cells[a] as f64;
            shape[a] = cells[a] + 1;
        }
        let strides = [shape[1] * shape[2], shape[2], 1];
        let len = shape[0] * shape[1] * shape[2];

        let mut boundary = vec![false; len];
        let mut weights = vec![0.0; len];
        for idx in 0..len {
            let ijk = [idx / strides[0], (idx / strides[1]) % shape[1], idx % shape[2]];
            let mut w = 1.0;
            for a in 0..dim {
                w *= h[a];
                if ijk[a] == 0 || ijk[a] == c[a] {
                    boundary[idx] = true;
                    w *= 0.5;
                }
            }
            weights[idx] = w;
        }

        Ok(Self {
            dim,
            cells: c,
            extent: e,
            spacing: h,
            shape,
            strides,
            boundary,
            weights,
        })
    }

    /// Unit square (or cube) with `n` cells per axis.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, &vec![n; dim], &vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.extent[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    #[inline]
    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] * self.strides[0] + ijk[1] * self.strides[1] + ijk[2]
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        [
            idx / self.strides[0],
            (idx / self.strides[1]) % self.shape[1],
            idx % self.shape[2],
        ]
    }

    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.shape[axis]
    }

    /// Physical position of a node.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ijk = self.coords(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = ijk[a] as f64 * self.spacing[a];
        }
        x
    }

    #[inline]
    pub fn is_boundary(&self, idx: usize) -> bool {
        self.boundary[idx]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Trapezoidal quadrature weights; they sum to the box volume.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Volume of one cell, the quadrature weight of an interior node.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing[a]).product()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| self.extent[a]).product()
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.boundary[i])
    }

    /// Number of symmetric-tensor components stored per node.
    pub fn sym_components(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    /// Bilinear (2D) or trilinear (3D) interpolation of nodal values at a
    /// point given in index coordinates. Points are clamped to the box.
    pub fn interpolate(&self, values: &[f64], xi: [f64; 3]) -> f64 {
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..self.dim {
            let n = self.cells[a];
            let x = xi[a].clamp(0.0, n as f64);
            let mut i = x.floor() as usize;
            if i >= n {
                i = n - 1;
            }
            base[a] = i;
            frac[a] = x - i as f64;
        }
        let corners = 1usize << self.dim;
        let mut acc = 0.0;
        for c in 0..corners {
            let mut w = 1.0;
            let mut idx = 0;
            for a in 0..self.dim {
                let bit = (c >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                idx += (base[a] + bit) * self.strides[a];
            }
            acc += w * values[idx];
        }
        acc
    }
}

/// Position in the upper-triangle storage of symmetric tensor entry `(i, j)`.
#[inline]
pub fn sym_index(i: usize, j: usize, dim: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    // rows 0..r contribute dim, dim-1, ... entries
    r * dim - r * (r.saturating_sub(1)) / 2 - r + c
}

/// Inverse of [`sym_index`].
pub fn sym_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in i..dim {
            out.push((i, j));
        }
    }
    out
}
