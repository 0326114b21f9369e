use std::sync::Arc;

use super::grid::{sym_index, sym_pairs, Grid};
use crate::error::{Error, Result};

/// Common read access to the nodal components of any field.
pub trait Field {
    fn grid(&self) -> &Arc<Grid>;
    fn components(&self) -> &[Vec<f64>];

    /// How many entries of the full tensor component `k` stands for.
    fn component_multiplicity(&self, _k: usize) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        check_len(grid, values.len())?;
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f` at every node position.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self {
            grid: grid.clone(),
            values,
        }
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

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &ScalarField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Field for ScalarField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn components(&self) -> &[Vec<f64>] {
        std::slice::from_ref(&self.values)
    }
}

/// Vector field with `dim` components. The `dirichlet` flag certifies that
/// every component vanishes on the boundary mask.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<f64>>,
    dirichlet: bool,
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            comps: vec![vec![0.0; grid.len()]; grid.dim()],
            dirichlet: false,
        }
    }

    /// Zero field flagged Dirichlet.
    pub fn zeros_dirichlet(grid: &Arc<Grid>) -> Self {
        let mut v = Self::zeros(grid);
        v.dirichlet = true;
        v
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector field needs {} components, got {}",
                grid.dim(),
                comps.len()
            )));
        }
        for c in &comps {
            check_len(grid, c.len())?;
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
            dirichlet: false,
        })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut comps = vec![vec![0.0; grid.len()]; grid.dim()];
        for i in 0..grid.len() {
            let v = f(grid.point(i));
            for (a, c) in comps.iter_mut().enumerate() {
                c[i] = v[a];
            }
        }
        Self {
            grid: grid.clone(),
            comps,
            dirichlet: false,
        }
    }

    /// Flags the field Dirichlet after checking it vanishes on the boundary.
    pub fn into_dirichlet(mut self) -> Result<Self> {
        let g = self.grid.clone();
        for (a, c) in self.comps.iter().enumerate() {
            if let Some(idx) = (0..g.len()).find(|&i| g.is_boundary(i) && c[i] != 0.0) {
                return Err(Error::NotDirichlet(format!(
                    "component {a} is {} at boundary node {:?}",
                    c[idx],
                    g.coords(idx)
                )));
            }
        }
        self.dirichlet = true;
        Ok(self)
    }

    /// Zeroes the boundary values and flags the field Dirichlet.
    pub fn enforce_dirichlet(&mut self) {
        let g = self.grid.clone();
        for c in &mut self.comps {
            for (i, v) in c.iter_mut().enumerate() {
                if g.is_boundary(i) {
                    *v = 0.0;
                }
            }
        }
        self.dirichlet = true;
    }

    pub fn is_dirichlet(&self) -> bool {
        self.dirichlet
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, a: usize) -> &[f64] {
        &self.comps[a]
    }

    /// Mutable access drops the Dirichlet certification.
    pub fn component_mut(&mut self, a: usize) -> &mut [f64] {
        self.dirichlet = false;
        &mut self.comps[a]
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (a, c) in self.comps.iter().enumerate() {
            v[a] = c[idx];
        }
        v
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// Scaling preserves the Dirichlet flag.
    pub fn scale(&mut self, c: f64) {
        for comp in &mut self.comps {
            comp.iter_mut().for_each(|v| *v *= c);
        }
    }

    /// `self += c * other`; the result stays Dirichlet only if both were.
    pub fn axpy(&mut self, c: f64, other: &VectorField) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            for (a, b) in x.iter_mut().zip(y) {
                *a += c * b;
            }
        }
        self.dirichlet = self.dirichlet && other.dirichlet;
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Field for VectorField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }
}

/// Symmetric tensor field storing the upper triangle, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<f64>>,
}

impl SymTensorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            comps: vec![vec![0.0; grid.len()]; grid.sym_components()],
        }
    }

    /// `c` times the identity at every node.
    pub fn identity(grid: &Arc<Grid>, c: f64) -> Self {
        let mut t = Self::zeros(grid);
        for i in 0..grid.dim() {
            t.comps[sym_index(i, i, grid.dim())].fill(c);
        }
        t
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.sym_components() {
            return Err(Error::ShapeMismatch(format!(
                "symmetric tensor needs {} components, got {}",
                grid.sym_components(),
                comps.len()
            )));
        }
        for c in &comps {
            check_len(grid, c.len())?;
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    /// Samples a full tensor function; only the upper triangle is kept.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [[f64; 3]; 3]) -> Self {
        let dim = grid.dim();
        let pairs = sym_pairs(dim);
        let mut comps = vec![vec![0.0; grid.len()]; pairs.len()];
        for idx in 0..grid.len() {
            let t = f(grid.point(idx));
            for (k, &(i, j)) in pairs.iter().enumerate() {
                comps[k][idx] = t[i][j];
            }
        }
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn get(&self, idx: usize, i: usize, j: usize) -> f64 {
        self.comps[sym_index(i, j, self.grid.dim())][idx]
    }

    /// Full tensor at a node; exactly symmetric by construction.
    pub fn full(&self, idx: usize) -> [[f64; 3]; 3] {
        let dim = self.grid.dim();
        let mut t = [[0.0; 3]; 3];
        for i in 0..dim {
            for j in 0..dim {
                t[i][j] = self.get(idx, i, j);
            }
        }
        t
    }

    pub fn set_full(&mut self, idx: usize, t: &[[f64; 3]; 3]) {
        let dim = self.grid.dim();
        for (k, (i, j)) in sym_pairs(dim).into_iter().enumerate() {
            self.comps[k][idx] = t[i][j];
        }
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.comps[k]
    }

    pub fn component_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.comps[k]
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    pub fn scale(&mut self, c: f64) {
        for comp in &mut self.comps {
            comp.iter_mut().for_each(|v| *v *= c);
        }
    }

    pub fn axpy(&mut self, c: f64, other: &SymTensorField) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            for (a, b) in x.iter_mut().zip(y) {
                *a += c * b;
            }
        }
    }
}

impl Field for SymTensorField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }
    fn component_multiplicity(&self, k: usize) -> f64 {
        let (i, j) = sym_pairs(self.grid.dim())[k];
        if i == j {
            1.0
        } else {
            2.0
        }
    }
}

/// Full (non-symmetric) tensor field, row-major `dim x dim` components.
/// Entry `(i, j)` of a velocity gradient is `d v_i / d x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<f64>>,
}

impl TensorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let d = grid.dim();
        Self {
            grid: grid.clone(),
            comps: vec![vec![0.0; grid.len()]; d * d],
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [[f64; 3]; 3]) -> Self {
        let d = grid.dim();
        let mut t = Self::zeros(grid);
        for idx in 0..grid.len() {
            let m = f(grid.point(idx));
            for i in 0..d {
                for j in 0..d {
                    t.comps[i * d + j][idx] = m[i][j];
                }
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, idx: usize, i: usize, j: usize) -> f64 {
        self.comps[i * self.grid.dim() + j][idx]
    }

    pub fn set(&mut self, idx: usize, i: usize, j: usize, v: f64) {
        let d = self.grid.dim();
        self.comps[i * d + j][idx] = v;
    }

    pub fn full(&self, idx: usize) -> [[f64; 3]; 3] {
        let d = self.grid.dim();
        let mut t = [[0.0; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                t[i][j] = self.get(idx, i, j);
            }
        }
        t
    }

    pub fn scale(&mut self, c: f64) {
        for comp in &mut self.comps {
            comp.iter_mut().for_each(|v| *v *= c);
        }
    }
}

impl Field for TensorField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }
}

/// Skew-symmetric tensor field; stores the strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewTensorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<f64>>,
}

impl SkewTensorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let d = grid.dim();
        Self {
            grid: grid.clone(),
            comps: vec![vec![0.0; grid.len()]; d * (d - 1) / 2],
        }
    }

    fn slot(dim: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        // strict upper triangle, row by row
        i * dim - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, idx: usize, i: usize, j: usize) -> f64 {
        let d = self.grid.dim();
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.comps[Self::slot(d, i, j)][idx],
            std::cmp::Ordering::Greater => -self.comps[Self::slot(d, j, i)][idx],
        }
    }

    pub fn set_upper(&mut self, idx: usize, i: usize, j: usize, v: f64) {
        let d = self.grid.dim();
        self.comps[Self::slot(d, i, j)][idx] = v;
    }

    pub fn full(&self, idx: usize) -> [[f64; 3]; 3] {
        let d = self.grid.dim();
        let mut t = [[0.0; 3]; 3];
        for i in 0..d {
            for j in 0..d {
                t[i][j] = self.get(idx, i, j);
            }
        }
        t
    }
}

impl Field for SkewTensorField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }
    fn component_multiplicity(&self, _k: usize) -> f64 {
        2.0
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} nodal values, got {len}",
            grid.len()
        )));
    }
    Ok(())
}

/// Fails unless both fields live on equal grids.
pub fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch("fields live on different grids".into()));
    }
    Ok(())
}
