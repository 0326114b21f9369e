//! Second-order difference operators on the node-centred grid.
//!
//! First derivatives are centred in the interior and use the three-point
//! one-sided closure on the boundary planes. Second derivatives use the
//! compact three-point stencil in the interior and the four-point one-sided
//! closure on the boundary. Every operator is exact on affine data.

use super::field::{
    same_grid, Field, ScalarField, SkewTensorField, SymTensorField, TensorField, VectorField,
};
use super::grid::{sym_index, Grid};
use crate::error::{Error, Result};

/// `d f / d x_axis` at every node.
pub fn diff(grid: &Grid, f: &[f64], axis: usize, out: &mut [f64]) {
    let n = grid.cells(axis);
    let s = grid.stride(axis);
    let inv = 1.0 / (2.0 * grid.spacing(axis));
    for idx in 0..grid.len() {
        let c = grid.coord(idx, axis);
        out[idx] = if c == 0 {
            (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) * inv
        } else if c == n {
            (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) * inv
        } else {
            (f[idx + s] - f[idx - s]) * inv
        };
    }
}

/// `d^2 f / d x_axis^2` at every node.
pub fn diff2(grid: &Grid, f: &[f64], axis: usize, out: &mut [f64]) {
    let n = grid.cells(axis);
    let s = grid.stride(axis);
    let h = grid.spacing(axis);
    let inv = 1.0 / (h * h);
    for idx in 0..grid.len() {
        let c = grid.coord(idx, axis);
        out[idx] = if c == 0 {
            (2.0 * f[idx] - 5.0 * f[idx + s] + 4.0 * f[idx + 2 * s] - f[idx + 3 * s]) * inv
        } else if c == n {
            (2.0 * f[idx] - 5.0 * f[idx - s] + 4.0 * f[idx - 2 * s] - f[idx - 3 * s]) * inv
        } else {
            (f[idx + s] - 2.0 * f[idx] + f[idx - s]) * inv
        };
    }
}

fn diff_vec(grid: &Grid, f: &[f64], axis: usize) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    diff(grid, f, axis, &mut out);
    out
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let g = f.grid().clone();
    let comps = (0..g.dim()).map(|a| diff_vec(&g, f.values(), a)).collect();
    VectorField::from_components(&g, comps).expect("gradient shape")
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let g = v.grid().clone();
    let mut acc = vec![0.0; g.len()];
    let mut tmp = vec![0.0; g.len()];
    for a in 0..g.dim() {
        diff(&g, v.component(a), a, &mut tmp);
        for (x, y) in acc.iter_mut().zip(&tmp) {
            *x += y;
        }
    }
    ScalarField::from_values(&g, acc).expect("divergence shape")
}

/// Row-wise divergence: `(div t)_i = sum_j d t_ij / d x_j`.
pub fn div_tensor(t: &SymTensorField) -> VectorField {
    let g = t.grid().clone();
    let d = g.dim();
    let mut comps = vec![vec![0.0; g.len()]; d];
    let mut tmp = vec![0.0; g.len()];
    for (i, out) in comps.iter_mut().enumerate() {
        for j in 0..d {
            diff(&g, t.component(sym_index(i, j, d)), j, &mut tmp);
            for (x, y) in out.iter_mut().zip(&tmp) {
                *x += y;
            }
        }
    }
    VectorField::from_components(&g, comps).expect("div_tensor shape")
}

fn laplacian_slice(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; grid.len()];
    let mut tmp = vec![0.0; grid.len()];
    for a in 0..grid.dim() {
        diff2(grid, f, a, &mut tmp);
        for (x, y) in acc.iter_mut().zip(&tmp) {
            *x += y;
        }
    }
    acc
}

pub fn scalar_laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let out = laplacian_slice(&g, f.values());
    ScalarField::from_values(&g, out).expect("laplacian shape")
}

/// Component-wise Laplacian.
pub fn laplacian(v: &VectorField) -> VectorField {
    let g = v.grid().clone();
    let comps = (0..g.dim())
        .map(|a| laplacian_slice(&g, v.component(a)))
        .collect();
    VectorField::from_components(&g, comps).expect("laplacian shape")
}

/// Velocity gradient `L_ij = d v_i / d x_j`.
pub fn velocity_gradient(v: &VectorField) -> TensorField {
    let g = v.grid().clone();
    let d = g.dim();
    let mut t = TensorField::zeros(&g);
    let mut tmp = vec![0.0; g.len()];
    for i in 0..d {
        for j in 0..d {
            diff(&g, v.component(i), j, &mut tmp);
            for (idx, val) in tmp.iter().enumerate() {
                t.set(idx, i, j, *val);
            }
        }
    }
    t
}

/// Splits a velocity gradient into its deformation (symmetric) and rotation
/// (skew) parts: `D = (L + L^T)/2`, `W = (L - L^T)/2`.
pub fn split_gradient(l: &TensorField) -> (SymTensorField, SkewTensorField) {
    let g = l.grid().clone();
    let d = g.dim();
    let mut sym = SymTensorField::zeros(&g);
    let mut skew = SkewTensorField::zeros(&g);
    for idx in 0..g.len() {
        for i in 0..d {
            for j in i..d {
                let a = l.get(idx, i, j);
                let b = l.get(idx, j, i);
                sym.component_mut(sym_index(i, j, d))[idx] = 0.5 * (a + b);
                if i < j {
                    skew.set_upper(idx, i, j, 0.5 * (a - b));
                }
            }
        }
    }
    (sym, skew)
}

/// Rate-of-deformation `D[v]` and rate-of-rotation `W[v]`.
pub fn rate_tensors(v: &VectorField) -> (SymTensorField, SkewTensorField) {
    split_gradient(&velocity_gradient(v))
}

pub fn deformation(v: &VectorField) -> SymTensorField {
    rate_tensors(v).0
}

/// Applies `A = -(Laplacian + grad div)` at the interior nodes of a field
/// that vanishes on the boundary, writing zero on boundary nodes.
///
/// The diagonal blocks use the compact second difference and the coupling
/// blocks the centred cross stencil, so restricted to interior nodes the
/// operator is symmetric positive definite.
pub fn apply_elliptic_interior(grid: &Grid, v: &[Vec<f64>], out: &mut [Vec<f64>]) {
    let d = grid.dim();
    let mut inv_h2 = [0.0; 3];
    let mut inv_4hh = [[0.0; 3]; 3];
    for a in 0..d {
        inv_h2[a] = 1.0 / (grid.spacing(a) * grid.spacing(a));
        for b in 0..d {
            inv_4hh[a][b] = 1.0 / (4.0 * grid.spacing(a) * grid.spacing(b));
        }
    }
    let st = [grid.stride(0), grid.stride(1), grid.stride(2)];
    for (a, out_a) in out.iter_mut().enumerate().take(d) {
        let va = &v[a];
        for idx in 0..grid.len() {
            if grid.is_boundary(idx) {
                out_a[idx] = 0.0;
                continue;
            }
            let c = va[idx];
            let mut acc = 0.0;
            for b in 0..d {
                let s = st[b];
                let d2 = (va[idx + s] - 2.0 * c + va[idx - s]) * inv_h2[b];
                acc += if b == a { 2.0 * d2 } else { d2 };
            }
            for b in 0..d {
                if b == a {
                    continue;
                }
                let (sa, sb) = (st[a], st[b]);
                let vb = &v[b];
                let cross = (vb[idx + sa + sb] - vb[idx + sa - sb] - vb[idx - sa + sb]
                    + vb[idx - sa - sb])
                    * inv_4hh[a][b];
                acc += cross;
            }
            out_a[idx] = -acc;
        }
    }
}

/// `d/dx_a div v`, with the `b = a` term taken as a second difference so
/// that one-sided closures are not composed along the same axis.
fn grad_div_slice(grid: &Grid, v: &VectorField, a: usize) -> Vec<f64> {
    let mut acc = vec![0.0; grid.len()];
    diff2(grid, v.component(a), a, &mut acc);
    let mut db = vec![0.0; grid.len()];
    let mut dab = vec![0.0; grid.len()];
    for b in (0..grid.dim()).filter(|&b| b != a) {
        diff(grid, v.component(b), b, &mut db);
        diff(grid, &db, a, &mut dab);
        for (x, y) in acc.iter_mut().zip(&dab) {
            *x += y;
        }
    }
    acc
}

/// Discrete elliptic operator `A_h v = -(Delta v + grad div v)` on a
/// Dirichlet field. Interior rows use the symmetric compact stencil of
/// [`apply_elliptic_interior`]; boundary rows use second-order one-sided
/// differences so that norms of `A_h v` see a consistent value everywhere.
pub fn op_a(v: &VectorField) -> Result<VectorField> {
    if !v.is_dirichlet() {
        return Err(Error::NotDirichlet(
            "the elliptic operator is only defined on Dirichlet fields".into(),
        ));
    }
    let g = v.grid().clone();
    let lap = laplacian(v);
    let mut interior = vec![vec![0.0; g.len()]; g.dim()];
    apply_elliptic_interior(&g, v.components(), &mut interior);
    for (a, comp) in interior.iter_mut().enumerate() {
        let gd = grad_div_slice(&g, v, a);
        for idx in 0..g.len() {
            if g.is_boundary(idx) {
                comp[idx] = -(lap.component(a)[idx] + gd[idx]);
            }
        }
    }
    VectorField::from_components(&g, interior)
}

/// `(w . grad) v`, the convective derivative of `v` along `w`.
pub fn convective(w: &VectorField, v: &VectorField) -> Result<VectorField> {
    same_grid(w.grid(), v.grid())?;
    let g = w.grid().clone();
    let d = g.dim();
    let mut comps = vec![vec![0.0; g.len()]; d];
    let mut tmp = vec![0.0; g.len()];
    for (i, out) in comps.iter_mut().enumerate() {
        for j in 0..d {
            diff(&g, v.component(i), j, &mut tmp);
            let wj = w.component(j);
            for idx in 0..g.len() {
                out[idx] += wj[idx] * tmp[idx];
            }
        }
    }
    VectorField::from_components(&g, comps)
}
