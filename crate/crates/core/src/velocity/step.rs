use super::VelocityTrajectory;
use crate::error::{Error, Result};
use crate::fields::norms::l2_sq;
use crate::fields::ops::apply_elliptic_interior;
use crate::fields::{same_grid, Field, Grid, VectorField};
use crate::linalg::{conjugate_gradient, CgSettings};
use crate::rheology::FluidParams;

/// Diagnostics of one backward-Euler velocity step.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityStepReport {
    pub lin_iters: usize,
    /// Relative residual of the linear solve.
    pub residual: f64,
    pub dt: f64,
    pub norm_u: f64,
    pub norm_du_dt: f64,
    pub norm_au: f64,
    pub dissipation: DissipationCheck,
}

/// Per-step energy balance
/// `alpha (|u|^2 - |u_prev|^2)/(2 dt) + (1-omega) <A_h u, u> <= <F, u> + slack`,
/// where `slack` is the contribution of the linear-solver residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual_slack: f64,
}

impl DissipationCheck {
    pub fn holds(&self) -> bool {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(1e-300);
        self.lhs <= self.rhs + self.residual_slack + 1e-12 * scale
    }
}

/// Interior inner product with the cell-volume weight; equals the
/// trapezoidal inner product whenever one argument vanishes on the boundary.
fn interior_dot(grid: &Grid, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        for idx in 0..grid.len() {
            if !grid.is_boundary(idx) {
                s += x[idx] * y[idx];
            }
        }
    }
    s * grid.cell_volume()
}

fn flatten(grid: &Grid, comps: &[Vec<f64>]) -> Vec<f64> {
    let n = grid.len();
    let mut out = vec![0.0; comps.len() * n];
    for (a, c) in comps.iter().enumerate() {
        for idx in 0..n {
            if !grid.is_boundary(idx) {
                out[a * n + idx] = c[idx];
            }
        }
    }
    out
}

fn unflatten(grid: &Grid, flat: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let n = grid.len();
    (0..dim).map(|a| flat[a * n..(a + 1) * n].to_vec()).collect()
}

/// One backward-Euler step of `alpha u' + (1-omega) A u = F` with homogeneous
/// Dirichlet data: solves `(alpha I + dt (1-omega) A_h) u = alpha u_prev + dt F`
/// on the interior nodes by conjugate gradients.
pub fn step_velocity(
    u_prev: &VectorField,
    f_rhs: &VectorField,
    dt: f64,
    params: &FluidParams,
    cg: CgSettings,
) -> Result<(VectorField, VelocityStepReport)> {
    if !u_prev.is_dirichlet() {
        return Err(Error::NotDirichlet("previous velocity".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    same_grid(u_prev.grid(), f_rhs.grid())?;
    let g = u_prev.grid().clone();
    let dim = g.dim();
    let n = g.len();
    let visc = dt * (1.0 - params.omega);
    let alpha = params.alpha;

    let mut rhs_comps = u_prev.components().to_vec();
    for (a, c) in rhs_comps.iter_mut().enumerate() {
        let f = f_rhs.component(a);
        for idx in 0..n {
            c[idx] = alpha * c[idx] + dt * f[idx];
        }
    }
    let b = flatten(&g, &rhs_comps);

    let apply = |x: &[f64], out: &mut [f64]| {
        let xs = unflatten(&g, x, dim);
        let mut ax = vec![vec![0.0; n]; dim];
        apply_elliptic_interior(&g, &xs, &mut ax);
        for a in 0..dim {
            for idx in 0..n {
                out[a * n + idx] = if g.is_boundary(idx) {
                    0.0
                } else {
                    alpha * x[a * n + idx] + visc * ax[a][idx]
                };
            }
        }
    };

    // warm start from the previous velocity
    let mut x = flatten(&g, u_prev.components());
    let outcome = conjugate_gradient(apply, &b, &mut x, cg)?;

    let mut mx = vec![0.0; b.len()];
    apply(&x, &mut mx);
    let resid: Vec<f64> = b.iter().zip(&mx).map(|(bi, mi)| bi - mi).collect();

    let u = VectorField::from_components(&g, unflatten(&g, &x, dim))?.into_dirichlet()?;

    let uc = u.components();
    let mut au = vec![vec![0.0; n]; dim];
    apply_elliptic_interior(&g, uc, &mut au);
    let norm_u_sq = l2_sq(&u);
    let norm_prev_sq = l2_sq(u_prev);
    let a_uu = interior_dot(&g, &au, uc);
    let f_u = interior_dot(&g, f_rhs.components(), uc);
    let res_u = interior_dot(&g, &unflatten(&g, &resid, dim), uc) / dt;
    let dissipation = DissipationCheck {
        lhs: alpha * (norm_u_sq - norm_prev_sq) / (2.0 * dt) + (1.0 - params.omega) * a_uu,
        rhs: f_u,
        residual_slack: res_u.abs(),
    };

    let mut du = u.clone();
    du.axpy(-1.0, u_prev);
    du.scale(1.0 / dt);
    let au_field = crate::fields::op_a(&u)?;
    let report = VelocityStepReport {
        lin_iters: outcome.iterations,
        residual: outcome.residual,
        dt,
        norm_u: norm_u_sq.sqrt(),
        norm_du_dt: l2_sq(&du).sqrt(),
        norm_au: l2_sq(&au_field).sqrt(),
        dissipation,
    };
    Ok((u, report))
}

/// Integrates the velocity problem over a window. `forcing[n]` is the right
/// side used for the step arriving at time `n dt`; `forcing[0]` is the
/// forcing at the initial time and only enters the estimates.
pub fn solve_velocity(
    u0: &VectorField,
    forcing: &[VectorField],
    dt: f64,
    params: &FluidParams,
    cg: CgSettings,
) -> Result<VelocityTrajectory> {
    let mut u = Vec::with_capacity(forcing.len());
    let mut reports = Vec::with_capacity(forcing.len().saturating_sub(1));
    u.push(u0.clone());
    for (n, f) in forcing.iter().enumerate().skip(1) {
        let (next, rep) =
            step_velocity(&u[n - 1], f, dt, params, cg).map_err(|e| e.at_step(n))?;
        u.push(next);
        reports.push(rep);
    }
    Ok(VelocityTrajectory {
        dt,
        u,
        forcing: forcing.to_vec(),
        reports,
    })
}
