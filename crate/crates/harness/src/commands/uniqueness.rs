use std::path::Path;

use oldroyd_core::fixed_point::{
    delta_threshold, difference_energy, fit_c12, perturb, smooth_direction, uniqueness_experiment,
    Converged, GronwallLedger,
};
use oldroyd_core::Error;

use super::{create_dir, parallel_map, solve};
use crate::config::RunConfig;
use crate::error::Result;
use crate::ledger::{write_rows, GronwallCsvRow};
use crate::presets::{build_grid, forcing, initial_data, perturbation};
use crate::report::{Check, Report};

/// Solutions from the base data, from perturbed data, and from the base
/// data again but starting the iteration from a different guess.
pub struct PairedRuns {
    pub base: Converged,
    pub perturbed: Converged,
    pub restarted: Converged,
}

pub fn paired_runs(cfg: &RunConfig, jobs: usize) -> Result<PairedRuns> {
    let grid = build_grid(cfg)?;
    let data = initial_data(&grid, cfg);
    let other = data.add(&perturbation(&grid, cfg.uniqueness.amplitude));
    let f = forcing(&grid, cfg);
    let steps = cfg.steps();
    let guess = {
        let base = oldroyd_core::fixed_point::IterTriple::constant(
            &data.u0, &data.sigma0, &data.tau0, steps, cfg.time.dt,
        )?;
        let dir = smooth_direction(&grid, steps, cfg.time.dt, [1.0, 1.0, 1.0], 0.5)?;
        perturb(&base, &dir, 0.05)?
    };
    let jobs_in = [0usize, 1, 2];
    let mut results = parallel_map(jobs, &jobs_in, |&k| {
        let mut hist = Vec::new();
        match k {
            0 => solve(cfg, &data, &f, None, None, &mut hist),
            1 => solve(cfg, &other, &f, None, None, &mut hist),
            _ => solve(cfg, &data, &f, None, Some(guess.clone()), &mut hist),
        }
    })
    .into_iter();
    let mut next = || results.next().expect("three runs");
    Ok(PairedRuns {
        base: next()?,
        perturbed: next()?,
        restarted: next()?,
    })
}

/// Smallest `C12` that makes the envelope hold for the pair.
pub fn fitted_c12(runs: &PairedRuns, cfg: &RunConfig) -> Result<f64> {
    Ok(fit_c12(
        runs.base.solution(),
        runs.perturbed.solution(),
        cfg.uniqueness.delta,
        &cfg.params,
    )?)
}

pub fn gronwall(runs: &PairedRuns, cfg: &RunConfig, c12: f64) -> Result<GronwallLedger> {
    Ok(uniqueness_experiment(
        runs.base.solution(),
        runs.perturbed.solution(),
        cfg.uniqueness.delta,
        c12,
        &cfg.params,
    )?)
}

/// Allowed relative excess of the energy over the envelope.
pub const ENVELOPE_FACTOR: f64 = 1.05;

/// Absolute floor for comparing energies of solutions computed to the
/// fixed-point tolerance.
pub fn energy_floor(cfg: &RunConfig) -> f64 {
    (10.0 * cfg.solver.tol_fp).powi(2)
}

pub fn execute(cfg: &RunConfig, out: &Path, jobs: usize) -> Result<Report> {
    cfg.validate()?;
    let threshold = delta_threshold(&cfg.params);
    if cfg.uniqueness.delta >= threshold {
        return Err(Error::DeltaTooLarge {
            delta: cfg.uniqueness.delta,
            threshold,
        }
        .into());
    }
    create_dir(out)?;
    let runs = paired_runs(cfg, jobs)?;
    let c12 = fitted_c12(&runs, cfg)?;
    let led = gronwall(&runs, cfg, c12)?;
    let rows: Vec<GronwallCsvRow> = led
        .rows
        .iter()
        .map(|r| GronwallCsvRow {
            t: r.t,
            energy: r.energy,
            rate: r.rate,
            envelope: r.envelope,
        })
        .collect();
    write_rows(&out.join("gronwall.csv"), &rows)?;

    let same = difference_energy(runs.base.solution(), runs.restarted.solution(), &cfg.params)?;
    let same_t = same.last().copied().unwrap_or(0.0);
    let floor = energy_floor(cfg);
    let worst = led
        .rows
        .iter()
        .map(|r| r.energy - (r.envelope * ENVELOPE_FACTOR + floor))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut r = Report::default();
    r.check(Check::at_most("identical-data-agreement", same_t, floor));
    r.check(Check::at_most("gronwall-envelope", worst, 0.0));
    r.metric("delta", cfg.uniqueness.delta);
    r.metric("delta_threshold", threshold);
    r.metric("amplitude", cfg.uniqueness.amplitude);
    r.metric("c12", c12);
    r.metric("energy_initial", led.rows.first().map_or(0.0, |x| x.energy));
    r.metric("energy_final", led.final_energy());
    r.metric("identical_energy_final", same_t);
    r.line(format!("delta {} below threshold {threshold:.6}", cfg.uniqueness.delta));
    r.line(format!("fitted C12 = {c12:.6e}"));
    r.line(format!("{:>10} {:>14} {:>14} {:>14}", "t", "energy", "envelope", "rate"));
    for row in &led.rows {
        r.line(format!(
            "{:>10.5} {:>14.6e} {:>14.6e} {:>14.6e}",
            row.t, row.energy, row.envelope, row.rate
        ));
    }
    r.line(format!("identical-data runs: e(T) = {same_t:.3e} (floor {floor:.1e})"));
    Ok(r)
}
