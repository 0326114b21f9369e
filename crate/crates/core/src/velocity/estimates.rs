use super::VelocityTrajectory;
use crate::error::Result;
use crate::fields::norms::{h_minus1_sq, l2_sq, sobolev_sq};
use crate::fields::{deformation, divergence, op_a, VectorField};
use crate::linalg::CgSettings;
use crate::rheology::FluidParams;

/// Cumulative value of an estimate up to time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of an a-priori estimate check over a whole trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Named contributions to both sides.
    pub terms: Vec<(&'static str, f64)>,
    pub rows: Vec<EstimateRow>,
}

impl EstimateReport {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `lhs / rhs`, or `None` when both sides vanish (the vacuous case).
    pub fn ratio(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs)
    }

    pub fn holds_within(&self, factor: f64) -> bool {
        self.lhs <= self.rhs * factor
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

pub(crate) fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    if lhs == 0.0 && rhs == 0.0 {
        None
    } else {
        Some(lhs / rhs)
    }
}

fn du_dt(traj: &VelocityTrajectory, n: usize) -> VectorField {
    traj.derivative(n)
}

/// Energy estimate for the velocity problem:
///
/// ```text
/// (alpha/2) int |u'|^2 + ((1-omega)^2/2) int |A_h u|^2
///   + (1-omega) sup |Du|^2 + (1-omega) sup |div u|^2
///   <= 4 (1-omega) |D u0|^2 + int |F|^2
/// ```
///
/// Time integrals are right-endpoint sums matching backward Euler.
pub fn check_estimate_4_6(traj: &VelocityTrajectory, params: &FluidParams) -> Result<EstimateReport> {
    let dt = traj.dt;
    let om = 1.0 - params.omega;
    let u0 = &traj.u[0];
    let rhs0 = 4.0 * om * l2_sq(&deformation(u0));

    let mut int_du = 0.0;
    let mut int_au = 0.0;
    let mut int_f = 0.0;
    let mut sup_d = l2_sq(&deformation(u0));
    let mut sup_div = l2_sq(&divergence(u0));
    let lhs_at = |int_du: f64, int_au: f64, sup_d: f64, sup_div: f64| {
        0.5 * params.alpha * int_du + 0.5 * om * om * int_au + om * sup_d + om * sup_div
    };
    let mut rows = vec![EstimateRow {
        t: 0.0,
        lhs: lhs_at(0.0, 0.0, sup_d, sup_div),
        rhs: rhs0,
    }];
    for n in 1..traj.u.len() {
        let u = &traj.u[n];
        int_du += dt * l2_sq(&du_dt(traj, n));
        int_au += dt * l2_sq(&op_a(u)?);
        int_f += dt * l2_sq(&traj.forcing[n]);
        sup_d = sup_d.max(l2_sq(&deformation(u)));
        sup_div = sup_div.max(l2_sq(&divergence(u)));
        rows.push(EstimateRow {
            t: n as f64 * dt,
            lhs: lhs_at(int_du, int_au, sup_d, sup_div),
            rhs: rhs0 + int_f,
        });
    }
    let last = *rows.last().expect("at least the initial row");
    Ok(EstimateReport {
        lhs: last.lhs,
        rhs: last.rhs,
        terms: vec![
            ("int_du_sq", int_du),
            ("int_au_sq", int_au),
            ("sup_d_sq", sup_d),
            ("sup_div_sq", sup_div),
            ("d_u0_sq", rhs0 / (4.0 * om)),
            ("int_f_sq", int_f),
        ],
        rows,
    })
}

/// Higher-order estimate: the left side
/// `|u|^2_{L2 H3} + |u|^2_{Linf H2} + |u'|^2_{L2 H1} + |u'|^2_{Linf L2}`
/// against the bracket
/// `|A_h u0|^2 + |F(0)|^2 + |F|^2_{L2 H1} + |F'|^2_{L2 H-1}`.
/// `F'` is the backward difference of the stored forcing; `H^-1` uses one
/// Dirichlet-Laplacian solve per component. The ratio of the two sides is
/// the empirical stability constant.
pub fn check_estimate_4_7(traj: &VelocityTrajectory, cg: CgSettings) -> Result<EstimateReport> {
    let dt = traj.dt;
    let u0 = &traj.u[0];
    let au0 = l2_sq(&op_a(u0)?);
    let f0 = l2_sq(&traj.forcing[0]);

    let mut int_h3 = 0.0;
    let mut sup_h2 = sobolev_sq(u0, 2)?;
    let mut int_du_h1 = 0.0;
    let mut sup_du = 0.0f64;
    let mut int_f_h1 = 0.0;
    let mut int_df = 0.0;
    let mut rows = vec![EstimateRow {
        t: 0.0,
        lhs: sup_h2,
        rhs: au0 + f0,
    }];
    for n in 1..traj.u.len() {
        let u = &traj.u[n];
        let du = du_dt(traj, n);
        int_h3 += dt * sobolev_sq(u, 3)?;
        sup_h2 = sup_h2.max(sobolev_sq(u, 2)?);
        int_du_h1 += dt * sobolev_sq(&du, 1)?;
        sup_du = sup_du.max(l2_sq(&du));
        int_f_h1 += dt * sobolev_sq(&traj.forcing[n], 1)?;
        let mut df = traj.forcing[n].clone();
        df.axpy(-1.0, &traj.forcing[n - 1]);
        if df.max_abs() > 0.0 {
            df.scale(1.0 / dt);
            int_df += dt * h_minus1_sq(&df, cg)?;
        }
        rows.push(EstimateRow {
            t: n as f64 * dt,
            lhs: int_h3 + sup_h2 + int_du_h1 + sup_du,
            rhs: au0 + f0 + int_f_h1 + int_df,
        });
    }
    let last = *rows.last().expect("at least the initial row");
    Ok(EstimateReport {
        lhs: last.lhs,
        rhs: last.rhs,
        terms: vec![
            ("int_u_h3_sq", int_h3),
            ("sup_u_h2_sq", sup_h2),
            ("int_du_h1_sq", int_du_h1),
            ("sup_du_sq", sup_du),
            ("a_u0_sq", au0),
            ("f0_sq", f0),
            ("int_f_h1_sq", int_f_h1),
            ("int_df_hm1_sq", int_df),
        ],
        rows,
    })
}
