use std::sync::Arc;

use super::params::FluidParams;
use crate::error::{Error, Result};
use crate::fields::{
    gradient, op_a, same_grid, Field, Grid, ScalarField, SymTensorField, TensorField, VectorField,
};

pub type Mat3 = [[f64; 3]; 3];

/// Non-transport part of the objective derivative at one node:
/// `g(L, tau) = tau W - W tau - a (D tau + tau D)` with `D`, `W` the
/// symmetric and skew parts of the velocity gradient `L`.
pub fn g_local(l: &Mat3, tau: &Mat3, a: f64, dim: usize) -> Mat3 {
    let mut d = [[0.0; 3]; 3];
    let mut w = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            d[i][j] = 0.5 * (l[i][j] + l[j][i]);
            w[i][j] = 0.5 * (l[i][j] - l[j][i]);
        }
    }
    let mut g = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            let mut tw = 0.0;
            let mut wt = 0.0;
            let mut dt = 0.0;
            let mut td = 0.0;
            for k in 0..dim {
                tw += tau[i][k] * w[k][j];
                wt += w[i][k] * tau[k][j];
                dt += d[i][k] * tau[k][j];
                td += tau[i][k] * d[k][j];
            }
            g[i][j] = tw - wt - a * (dt + td);
        }
    }
    g
}

/// `g(grad w, tau)` at every node. Only the upper triangle is kept, so the
/// result is exactly symmetric.
pub fn g_term(grad_w: &TensorField, tau: &SymTensorField, a: f64) -> Result<SymTensorField> {
    same_grid(grad_w.grid(), tau.grid())?;
    let g = tau.grid().clone();
    let mut out = SymTensorField::zeros(&g);
    for idx in 0..g.len() {
        let r = g_local(&grad_w.full(idx), &tau.full(idx), a, g.dim());
        out.set_full(idx, &r);
    }
    Ok(out)
}

/// Pressure remainder `w(sigma) = p'(alpha + eps^2 sigma) - p'(alpha)`.
///
/// Fails when `alpha + eps^2 sigma` leaves the operating band.
pub fn pressure_w(sigma: &ScalarField, params: &FluidParams) -> Result<ScalarField> {
    let g = sigma.grid().clone();
    let (lo, hi) = params.density_band();
    if let Some(idx) = (0..g.len()).find(|&i| {
        let rho = params.density(sigma.values()[i]);
        !(rho >= lo && rho <= hi)
    }) {
        return Err(Error::PressureRange {
            density: params.density(sigma.values()[idx]),
            reason: format!("outside operating band [{lo}, {hi}] at node {:?}", g.coords(idx)),
        });
    }
    if params.pressure.has_constant_sound_speed() {
        return Ok(ScalarField::zeros(&g));
    }
    let base = params.pressure.dp_drho(params.alpha, params.eps)?;
    let values = sigma
        .values()
        .iter()
        .map(|s| Ok(params.pressure.dp_drho(params.density(*s), params.eps)? - base))
        .collect::<Result<Vec<_>>>()?;
    ScalarField::from_values(&g, values)
}

/// Checks `m1/2 <= alpha + eps^2 pi <= 2 M1` at every node.
pub fn check_density_band(pi: &ScalarField, params: &FluidParams) -> Result<(f64, f64)> {
    let (lo, hi) = params.density_band();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (idx, p) in pi.values().iter().enumerate() {
        let rho = params.density(*p);
        if !(rho >= lo && rho <= hi) {
            return Err(Error::DensityBand {
                node: pi.grid().coords(idx),
                step: None,
                value: rho,
                lower: lo,
                upper: hi,
            });
        }
        min = min.min(rho);
        max = max.max(rho);
    }
    Ok((min, max))
}

/// Source term `F(w, pi) = alpha f + (1-omega) eps^2 pi/(alpha + eps^2 pi) A_h w
/// + eps^2/(alpha + eps^2 pi) (pi - w(pi)) grad pi`.
///
/// The full momentum forcing adds `-alpha (w.grad) w - grad pi + div psi`.
pub fn source_f(
    w: &VectorField,
    pi: &ScalarField,
    f: &VectorField,
    params: &FluidParams,
) -> Result<VectorField> {
    same_grid(w.grid(), pi.grid())?;
    same_grid(w.grid(), f.grid())?;
    check_density_band(pi, params)?;
    let g: Arc<Grid> = w.grid().clone();
    let eps2 = params.eps * params.eps;
    let aw = op_a(w)?;
    let grad_pi = gradient(pi);
    let wp = pressure_w(pi, params)?;
    let mut comps = vec![vec![0.0; g.len()]; g.dim()];
    for idx in 0..g.len() {
        let p = pi.values()[idx];
        let rho = params.alpha + eps2 * p;
        let c_visc = (1.0 - params.omega) * eps2 * p / rho;
        let c_press = eps2 / rho * (p - wp.values()[idx]);
        for (a, comp) in comps.iter_mut().enumerate() {
            comp[idx] = params.alpha * f.component(a)[idx]
                + c_visc * aw.component(a)[idx]
                + c_press * grad_pi.component(a)[idx];
        }
    }
    VectorField::from_components(&g, comps)
}
