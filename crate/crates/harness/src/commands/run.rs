use std::path::Path;

use oldroyd_core::fields::{mean, Field};
use oldroyd_core::fixed_point::{check_initial_data, check_membership, coupled_residual};

use super::{budgets, create_dir, map_settings, solve, write_snapshots};
use crate::config::RunConfig;
use crate::error::Result;
use crate::ledger::{write_rows, ConvergenceRow, EnergyLedger};
use crate::presets::{build_grid, forcing, initial_data};
use crate::report::{Check, Report};

/// Solves the coupled problem by fixed-point iteration and writes
/// `energy.csv`, `convergence.csv` and the initial and final snapshots.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Report> {
    cfg.validate()?;
    let grid = build_grid(cfg)?;
    let data = initial_data(&grid, cfg);
    check_initial_data(&data.u0, &data.sigma0, &cfg.params)?;
    let f = forcing(&grid, cfg);
    create_dir(out)?;
    std::fs::write(out.join("config.cfg"), cfg.to_text())
        .map_err(|e| crate::error::HarnessError::io(out.join("config.cfg"), e))?;

    let b = budgets(cfg, &data, &f)?;
    let mut history: Vec<ConvergenceRow> = Vec::new();
    let solved = solve(cfg, &data, &f, Some(b), None, &mut history);
    write_rows(&out.join("convergence.csv"), &history)?;
    let conv = solved?;
    let sol = conv.solution();
    let params = &cfg.params;

    let ledger = EnergyLedger::from_output(&conv.output, params, map_settings(cfg).cg)?;
    ledger.write(&out.join("energy.csv"))?;
    write_snapshots(out, sol)?;

    let mut r = Report::default();
    let dt = cfg.time.dt;
    let e46 = &ledger.estimate_4_6;
    r.check(Check::at_most("energy-estimate", e46.lhs, e46.rhs * (1.0 + 10.0 * dt)));
    let worst_dissipation = ledger
        .rows
        .iter()
        .skip(1)
        .map(|row| row.dissipation_slack)
        .fold(f64::INFINITY, f64::min);
    r.check(Check::flag("step-dissipation", ledger.dissipation_holds));

    let (lo, hi) = params.density_band();
    let (dmin, dmax) = sol
        .pi
        .iter()
        .flat_map(|s| s.values().iter())
        .map(|s| params.density(*s))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    r.check(Check::at_least("density-band-lower", dmin, lo));
    r.check(Check::at_most("density-band-upper", dmax, hi));
    let mean_dev = sol
        .pi
        .iter()
        .map(|s| mean(s).abs() / (1.0 + s.max_abs()))
        .fold(0.0, f64::max);
    r.check(Check::at_most("density-mean-zero", mean_dev, 1e-12));
    let asym = sol
        .psi
        .iter()
        .flat_map(|t| {
            let d = t.grid().dim();
            (0..t.grid().len()).map(move |idx| {
                let m = t.full(idx);
                (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| (m[i][j] - m[j][i]).abs())
                    .fold(0.0, f64::max)
            })
        })
        .fold(0.0, f64::max);
    r.check(Check::at_most("stress-symmetry", asym, 0.0));
    let resid = coupled_residual(sol, &f, params, map_settings(cfg))?;
    r.check(Check::at_most("coupled-residual", resid.max(), 10.0 * cfg.solver.tol_fp));
    let member = check_membership(sol, b, params)?;
    r.check(Check::flag("invariant-set-membership", member.pass()));

    let contraction = conv.contraction();
    r.metric("steps", cfg.steps());
    r.metric("iterations", conv.history.len());
    r.metric("final_distance", conv.history.last().map_or(0.0, |h| h.distance.total));
    r.metric("contraction_ratio", contraction);
    r.metric("monotone", conv.is_monotone());
    r.metric("lhs_4_6", e46.lhs);
    r.metric("rhs_4_6", e46.rhs);
    r.metric("slack_4_6", e46.slack());
    r.metric("min_step_dissipation_slack", if worst_dissipation.is_finite() { worst_dissipation } else { 0.0 });
    r.metric("lhs_4_7", ledger.estimate_4_7.lhs);
    r.metric("rhs_4_7", ledger.estimate_4_7.rhs);
    r.metric("c1_emp", ledger.c1_emp());
    r.metric("c_omega_sigma", ledger.c_omega_sigma);
    r.metric("c_omega_tau", ledger.c_omega_tau);
    r.metric("coupled_residual", resid.max());
    r.metric("density_min", dmin);
    r.metric("density_max", dmax);
    r.metric("budget_b1", b.b1);
    r.metric("budget_b2", b.b2);
    r.metric("membership_min_slack", member.min_slack());

    r.line(format!(
        "converged in {} iterations, final distance {:.3e}, contraction ratio {}",
        conv.history.len(),
        conv.history.last().map_or(0.0, |h| h.distance.total),
        contraction.map_or("n/a".to_string(), |c| format!("{c:.4}")),
    ));
    r.line(format!(
        "energy estimate: lhs {:.6e} <= rhs {:.6e} (slack {:.6e})",
        e46.lhs,
        e46.rhs,
        e46.slack()
    ));
    r.line(format!(
        "C1_emp {:.4}, C_Omega sigma {:.4} tau {:.4}, coupled residual {:.3e}",
        ledger.c1_emp(),
        ledger.c_omega_sigma,
        ledger.c_omega_tau,
        resid.max()
    ));
    r.line(format!("density range [{dmin:.6}, {dmax:.6}] within [{lo}, {hi}]"));
    Ok(r)
}
