use nalgebra::{DMatrix, DVector};

use super::characteristics::{trace, CharacteristicMap};
use crate::error::{Error, Result};
use crate::fields::{
    same_grid, sym_pairs, velocity_gradient, Field, SymTensorField, VectorField,
};
use crate::rheology::{g_local, FluidParams, Mat3};

/// Time discretization of the local relaxation/coupling ODE along a
/// characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StressScheme {
    /// Exact solution of the frozen-coefficient linear ODE via a matrix
    /// exponential. Exact for pure relaxation.
    #[default]
    Exponential,
    /// `tau + We (tau - tau_dep)/dt + We g(grad w, tau) = 2 omega D[w]`.
    BackwardEuler,
}

impl StressScheme {
    pub fn name(self) -> &'static str {
        match self {
            StressScheme::Exponential => "exponential",
            StressScheme::BackwardEuler => "backward-euler",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exponential" => Some(StressScheme::Exponential),
            "backward-euler" => Some(StressScheme::BackwardEuler),
            _ => None,
        }
    }
}

/// Matrix of `tau -> g(L, tau)` on the independent symmetric components.
pub fn g_matrix(l: &Mat3, a: f64, dim: usize) -> DMatrix<f64> {
    let pairs = sym_pairs(dim);
    let k = pairs.len();
    let mut m = DMatrix::zeros(k, k);
    for (col, &(i, j)) in pairs.iter().enumerate() {
        let mut e = [[0.0; 3]; 3];
        e[i][j] = 1.0;
        e[j][i] = 1.0;
        let r = g_local(l, &e, a, dim);
        for (row, &(p, q)) in pairs.iter().enumerate() {
            m[(row, col)] = r[p][q];
        }
    }
    m
}

/// Per-node update for `tau + We (tau' + g(L, tau)) = 2 omega D` over `dt`,
/// starting from `tau_dep`; all tensors as symmetric component vectors.
pub fn local_update(
    l: &Mat3,
    tau_dep: &DVector<f64>,
    dt: f64,
    params: &FluidParams,
    dim: usize,
    scheme: StressScheme,
) -> Option<DVector<f64>> {
    let pairs = sym_pairs(dim);
    let k = pairs.len();
    let gm = g_matrix(l, params.a, dim);
    let d = DVector::from_iterator(k, pairs.iter().map(|&(i, j)| 0.5 * (l[i][j] + l[j][i])));
    let we = params.we;
    match scheme {
        StressScheme::BackwardEuler => {
            let m = DMatrix::identity(k, k) * (1.0 + we / dt) + gm * we;
            let rhs = d * (2.0 * params.omega) + tau_dep * (we / dt);
            m.lu().solve(&rhs)
        }
        StressScheme::Exponential => {
            // tau' = -(I/We + G) tau + (2 omega / We) D, solved through the
            // exponential of the augmented (k+1)x(k+1) generator
            let mut aug = DMatrix::zeros(k + 1, k + 1);
            for r in 0..k {
                for c in 0..k {
                    aug[(r, c)] = -dt * gm[(r, c)];
                }
                aug[(r, r)] -= dt / we;
                aug[(r, k)] = dt * 2.0 * params.omega / we * d[r];
            }
            let e = aug.exp();
            let mut out = DVector::zeros(k);
            for r in 0..k {
                let mut s = e[(r, k)];
                for c in 0..k {
                    s += e[(r, c)] * tau_dep[c];
                }
                out[r] = s;
            }
            Some(out)
        }
    }
}

/// One step of `tau + We (tau' + (w.grad) tau + g(grad w, tau)) = 2 omega D[w]`.
pub fn step_stress(
    tau_prev: &SymTensorField,
    w: &VectorField,
    dt: f64,
    params: &FluidParams,
    scheme: StressScheme,
) -> Result<SymTensorField> {
    let map = trace(w, dt)?;
    step_stress_on(&map, tau_prev, w, params, scheme)
}

/// Stress step along a precomputed characteristic map: advect each
/// component to the departure points, then apply the local update at the
/// arrival node with `grad w` frozen there.
pub fn step_stress_on(
    map: &CharacteristicMap,
    tau_prev: &SymTensorField,
    w: &VectorField,
    params: &FluidParams,
    scheme: StressScheme,
) -> Result<SymTensorField> {
    same_grid(map.grid(), tau_prev.grid())?;
    same_grid(map.grid(), w.grid())?;
    let g = tau_prev.grid().clone();
    let dim = g.dim();
    let k = g.sym_components();
    let dep: Vec<Vec<f64>> = (0..k).map(|c| map.advect(tau_prev.component(c))).collect();
    let grad = velocity_gradient(w);
    let still = w.max_abs() == 0.0;
    let decay = (-map.dt() / params.we).exp();
    let mut out = vec![vec![0.0; g.len()]; k];
    for idx in 0..g.len() {
        if still && scheme == StressScheme::Exponential {
            // pure relaxation, kept free of matrix-exponential round-off
            for c in 0..k {
                out[c][idx] = dep[c][idx] * decay;
            }
            continue;
        }
        let tau_dep = DVector::from_iterator(k, (0..k).map(|c| dep[c][idx]));
        let r = local_update(&grad.full(idx), &tau_dep, map.dt(), params, dim, scheme)
            .filter(|v| v.iter().all(|x| x.is_finite()))
            .ok_or(Error::SingularStress {
                node: g.coords(idx),
            })?;
        for c in 0..k {
            out[c][idx] = r[c];
        }
    }
    SymTensorField::from_components(&g, out)
}
