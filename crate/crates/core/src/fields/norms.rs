//! Discrete Lebesgue and Sobolev norms.
//!
//! Integrals use the trapezoidal weights of the grid, so a unit constant on
//! the unit box has unit L2 norm. `H^k` adds the full tensor of difference
//! quotients of every order up to `k`, built by repeated application of the
//! first-derivative stencil; for `k = 3` this approximates the continuum
//! `H^3` norm (one-sided closures make it first order near the boundary).

use super::field::{Field, ScalarField};
use super::grid::Grid;
use super::ops::{diff, diff2};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, CgSettings};

pub const MAX_SOBOLEV_ORDER: usize = 3;

/// Weighted sum of squares of one nodal array.
pub fn sq_integral(grid: &Grid, f: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .zip(f)
        .map(|(w, v)| w * v * v)
        .sum()
}

/// Discrete `L^2` inner product of two fields with the same layout.
pub fn inner<F: Field>(a: &F, b: &F) -> f64 {
    let g = a.grid();
    a.components()
        .iter()
        .zip(b.components())
        .enumerate()
        .map(|(k, (x, y))| {
            let m = a.component_multiplicity(k);
            m * g
                .weights()
                .iter()
                .zip(x.iter().zip(y))
                .map(|(w, (p, q))| w * p * q)
                .sum::<f64>()
        })
        .sum()
}

pub fn l2<F: Field>(f: &F) -> f64 {
    l2_sq(f).sqrt()
}

pub fn l2_sq<F: Field>(f: &F) -> f64 {
    let g = f.grid();
    f.components()
        .iter()
        .enumerate()
        .map(|(k, c)| f.component_multiplicity(k) * sq_integral(g, c))
        .sum()
}

/// Squared `H^k` norm: sum over orders `0..=k` of the squared `L^2` norm of
/// all difference quotients of that order.
pub fn sobolev_sq<F: Field>(f: &F, k: usize) -> Result<f64> {
    if k > MAX_SOBOLEV_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Sobolev order {k} exceeds {MAX_SOBOLEV_ORDER}"
        )));
    }
    let g = f.grid();
    let mut total = 0.0;
    for (c, comp) in f.components().iter().enumerate() {
        let m = f.component_multiplicity(c);
        let mut level: Vec<Vec<f64>> = vec![comp.clone()];
        total += m * sq_integral(g, comp);
        for _order in 1..=k {
            let mut next = Vec::with_capacity(level.len() * g.dim());
            for fun in &level {
                for a in 0..g.dim() {
                    let mut out = vec![0.0; g.len()];
                    diff(g, fun, a, &mut out);
                    total += m * sq_integral(g, &out);
                    next.push(out);
                }
            }
            level = next;
        }
    }
    Ok(total)
}

/// `H^k` norm of any field, `k <= 3`.
pub fn norm<F: Field>(f: &F, k: usize) -> Result<f64> {
    Ok(sobolev_sq(f, k)?.sqrt())
}

/// Weighted mean of a scalar field.
pub fn mean(f: &ScalarField) -> f64 {
    let g = f.grid();
    let s: f64 = g.weights().iter().zip(f.values()).map(|(w, v)| w * v).sum();
    s / g.volume()
}

/// Subtracts the discrete mean.
pub fn mean_zero_project(f: &ScalarField) -> ScalarField {
    let mut out = f.clone();
    let m = mean(f);
    out.values_mut().iter_mut().for_each(|v| *v -= m);
    out
}

/// Squared discrete `H^{-1}` norm: `<f, z>` where `-Delta_h z = f` with
/// homogeneous Dirichlet data, summed over components. Boundary values of
/// `f` do not enter (the dual of `H^1_0`).
pub fn h_minus1_sq<F: Field>(f: &F, cfg: CgSettings) -> Result<f64> {
    let g = f.grid();
    let vol = g.cell_volume();
    let mut total = 0.0;
    for (c, comp) in f.components().iter().enumerate() {
        let m = f.component_multiplicity(c);
        let b: Vec<f64> = (0..g.len())
            .map(|i| if g.is_boundary(i) { 0.0 } else { comp[i] })
            .collect();
        let mut z = vec![0.0; g.len()];
        let apply = |p: &[f64], out: &mut [f64]| neg_laplacian_interior(g, p, out);
        conjugate_gradient(apply, &b, &mut z, cfg)?;
        total += m * vol * b.iter().zip(&z).map(|(x, y)| x * y).sum::<f64>();
    }
    Ok(total)
}

/// `-Delta_h` on interior nodes with zero Dirichlet data.
pub fn neg_laplacian_interior(g: &Grid, p: &[f64], out: &mut [f64]) {
    let mut tmp = vec![0.0; g.len()];
    out.iter_mut().for_each(|v| *v = 0.0);
    for a in 0..g.dim() {
        diff2(g, p, a, &mut tmp);
        for i in 0..g.len() {
            if !g.is_boundary(i) {
                out[i] -= tmp[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::field::{SymTensorField, VectorField};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn unit_constant_has_unit_norm() {
        let g = Arc::new(Grid::unit(2, 16).unwrap());
        let f = ScalarField::constant(&g, 1.0);
        assert!((norm(&f, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!((norm(&f, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_above_three_rejected() {
        let g = Arc::new(Grid::unit(2, 8).unwrap());
        let f = ScalarField::constant(&g, 1.0);
        assert!(matches!(norm(&f, 4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn mean_zero_projection() {
        let g = Arc::new(Grid::unit(2, 8).unwrap());
        let f = ScalarField::constant(&g, 5.0);
        assert!(mean_zero_project(&f).max_abs() < 1e-14);
        let c = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos());
        assert!(mean(&c).abs() < 1e-15);
    }

    #[test]
    fn h1_norm_of_cosine_converges() {
        let exact = 0.5 * (1.0 + 4.0 * PI * PI);
        let mut errs = Vec::new();
        for n in [32, 64] {
            let g = Arc::new(Grid::unit(2, n).unwrap());
            let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0]).cos());
            errs.push((sobolev_sq(&f, 1).unwrap() - exact).abs());
        }
        assert!(errs[1] < 0.01 * exact);
        assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
    }

    #[test]
    fn tensor_norm_counts_off_diagonals_twice() {
        let g = Arc::new(Grid::unit(2, 8).unwrap());
        let t = SymTensorField::from_fn(&g, |_| [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]]);
        assert!((l2_sq(&t) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn h_minus1_of_eigenfunction() {
        // -Delta sin(pi x) sin(pi y) = 2 pi^2 (.), so |f|_{-1}^2 = |f|^2 / (2 pi^2)
        let g = Arc::new(Grid::unit(2, 32).unwrap());
        let f = VectorField::from_fn(&g, |x| [(PI * x[0]).sin() * (PI * x[1]).sin(), 0.0, 0.0]);
        let hm1 = h_minus1_sq(&f, CgSettings::default()).unwrap();
        let exact = 0.25 / (2.0 * PI * PI);
        assert!((hm1 - exact).abs() < 0.01 * exact, "{hm1} vs {exact}");
    }
}
