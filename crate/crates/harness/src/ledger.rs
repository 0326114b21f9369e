//! CSV ledgers. Column order follows the field order of each row type.
//!
//! `energy.csv` (one row per time level, `t` increasing):
//! `t, norm_u, norm_du_dt, norm_au, lin_iters, lin_residual,
//! dissipation_lhs, dissipation_rhs, dissipation_slack, lhs_4_6, rhs_4_6,
//! slack_4_6, lhs_4_7, rhs_4_7, c1_emp, mean_sigma_preproject, density_min,
//! density_max, sup_tau_h2, fitted_c_omega_sigma, fitted_c_omega_tau`.
//! Estimate columns are running values over `[0, t]`. `c1_emp` is
//! `lhs_4_7 / rhs_4_7`, written as 0 when both sides vanish.
//!
//! `convergence.csv`: `iteration, distance, distance_u, distance_sigma,
//! distance_tau, ratio, membership_slack` (`ratio` empty on the first row).

use std::path::Path;

use oldroyd_core::fields::{l2, norm, op_a};
use oldroyd_core::fixed_point::{IterationRecord, MapOutput};
use oldroyd_core::linalg::CgSettings;
use oldroyd_core::rheology::FluidParams;
use oldroyd_core::transport::{density_bounds_running, stress_bounds_running};
use oldroyd_core::velocity::{check_estimate_4_6, check_estimate_4_7, EstimateReport};
use serde::Serialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub t: f64,
    pub norm_u: f64,
    pub norm_du_dt: f64,
    pub norm_au: f64,
    pub lin_iters: usize,
    pub lin_residual: f64,
    pub dissipation_lhs: f64,
    pub dissipation_rhs: f64,
    /// `rhs + residual slack - lhs`; nonnegative when the step dissipates.
    pub dissipation_slack: f64,
    pub lhs_4_6: f64,
    pub rhs_4_6: f64,
    pub slack_4_6: f64,
    pub lhs_4_7: f64,
    pub rhs_4_7: f64,
    pub c1_emp: f64,
    pub mean_sigma_preproject: f64,
    pub density_min: f64,
    pub density_max: f64,
    pub sup_tau_h2: f64,
    pub fitted_c_omega_sigma: f64,
    pub fitted_c_omega_tau: f64,
}

/// Monitored quantities of one converged run.
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    pub rows: Vec<EnergyRow>,
    pub estimate_4_6: EstimateReport,
    pub estimate_4_7: EstimateReport,
    pub c_omega_sigma: f64,
    pub c_omega_tau: f64,
    /// Whether every step satisfied the per-step dissipation inequality.
    pub dissipation_holds: bool,
}

fn c1(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

impl EnergyLedger {
    /// Builds the ledger from the last map application of a converged run.
    pub fn from_output(out: &MapOutput, params: &FluidParams, cg: CgSettings) -> Result<Self> {
        let traj = &out.velocity;
        let sol = &out.triple;
        let dt = sol.dt;
        let e46 = check_estimate_4_6(traj, params)?;
        let e47 = check_estimate_4_7(traj, cg)?;
        let dens = density_bounds_running(&sol.pi, &sol.w, dt, params)?;
        let floors: Vec<f64> = dens.iter().map(|b| b.c_omega).collect();
        let strs = stress_bounds_running(&sol.psi, &sol.w, dt, params, &floors)?;

        let (lo0, hi0) = sol.pi[0]
            .values()
            .iter()
            .map(|s| params.density(*s))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r), b.max(r)));
        let mut rows = Vec::with_capacity(sol.w.len());
        for n in 0..sol.w.len() {
            let u = &traj.u[n];
            let (rep, dens_rep) = if n > 0 {
                (Some(&traj.reports[n - 1]), Some(&out.density[n - 1]))
            } else {
                (None, None)
            };
            let norm_au = match rep {
                Some(r) => r.norm_au,
                None => l2(&op_a(u)?),
            };
            let (r46, r47) = (e46.rows[n], e47.rows[n]);
            rows.push(EnergyRow {
                t: n as f64 * dt,
                norm_u: norm(u, 0)?,
                norm_du_dt: rep.map_or(0.0, |r| r.norm_du_dt),
                norm_au,
                lin_iters: rep.map_or(0, |r| r.lin_iters),
                lin_residual: rep.map_or(0.0, |r| r.residual),
                dissipation_lhs: rep.map_or(0.0, |r| r.dissipation.lhs),
                dissipation_rhs: rep.map_or(0.0, |r| r.dissipation.rhs),
                dissipation_slack: rep.map_or(0.0, |r| {
                    r.dissipation.rhs + r.dissipation.residual_slack - r.dissipation.lhs
                }),
                lhs_4_6: r46.lhs,
                rhs_4_6: r46.rhs,
                slack_4_6: r46.rhs - r46.lhs,
                lhs_4_7: r47.lhs,
                rhs_4_7: r47.rhs,
                c1_emp: c1(r47.lhs, r47.rhs),
                mean_sigma_preproject: dens_rep.map_or(0.0, |d| d.mean_pre_projection),
                density_min: dens_rep.map_or(lo0, |d| d.density_min),
                density_max: dens_rep.map_or(hi0, |d| d.density_max),
                sup_tau_h2: strs[n].sup_h2,
                fitted_c_omega_sigma: dens[n].c_omega,
                fitted_c_omega_tau: strs[n].c_omega,
            });
        }
        let dissipation_holds = traj.reports.iter().all(|r| r.dissipation.holds());
        Ok(EnergyLedger {
            rows,
            c_omega_sigma: dens.last().map_or(0.0, |b| b.c_omega),
            c_omega_tau: strs.last().map_or(0.0, |b| b.c_omega),
            estimate_4_6: e46,
            estimate_4_7: e47,
            dissipation_holds,
        })
    }

    /// Empirical constant of the higher-order estimate; 0 for vanishing data.
    pub fn c1_emp(&self) -> f64 {
        c1(self.estimate_4_7.lhs, self.estimate_4_7.rhs)
    }

    /// Larger of the two fitted transport constants.
    pub fn c_omega(&self) -> f64 {
        self.c_omega_sigma.max(self.c_omega_tau)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_rows(path, &self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub iteration: usize,
    pub distance: f64,
    pub distance_u: f64,
    pub distance_sigma: f64,
    pub distance_tau: f64,
    pub ratio: Option<f64>,
    pub membership_slack: Option<f64>,
}

impl From<&IterationRecord> for ConvergenceRow {
    fn from(r: &IterationRecord) -> Self {
        Self {
            iteration: r.iteration,
            distance: r.distance.total,
            distance_u: r.distance.u,
            distance_sigma: r.distance.sigma,
            distance_tau: r.distance.tau,
            ratio: r.ratio,
            membership_slack: r.membership_slack,
        }
    }
}

/// `gronwall.csv`: `t, energy, rate, envelope`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallCsvRow {
    pub t: f64,
    pub energy: f64,
    pub rate: f64,
    pub envelope: f64,
}

/// `probe.csv`: `delta, distance_u, distance_sigma, distance_tau, distance,
/// normalized_ratio`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCsvRow {
    pub delta: f64,
    pub distance_u: f64,
    pub distance_sigma: f64,
    pub distance_tau: f64,
    pub distance: f64,
    pub normalized_ratio: Option<f64>,
}

/// `mms.csv`: `study, n, steps, error, order` (`order` empty on the first
/// row of a study, `exact` when the error is at round-off level).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmsCsvRow {
    pub study: String,
    pub n: usize,
    pub steps: usize,
    pub error: f64,
    pub order: String,
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}
