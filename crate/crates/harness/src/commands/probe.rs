use std::f64::consts::PI;
use std::path::Path;

use oldroyd_core::fixed_point::{continuity_probe, smooth_direction, ProbeReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{create_dir, map_settings, solve};
use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::ledger::{write_rows, ProbeCsvRow};
use crate::presets::{build_grid, forcing, initial_data};
use crate::report::{Check, Report};

/// Allowed departure of the normalized distances from linear scaling.
pub const LINEARITY_FACTOR: f64 = 1.5;

/// Seed from `OLDROYD_SEED`, 0 when unset.
pub fn seed() -> Result<u64> {
    match std::env::var("OLDROYD_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("OLDROYD_SEED = `{s}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Applies the map around the converged solution for perturbations of
/// size `delta, delta/2, ...` along a smooth direction whose phase is drawn
/// from the seed.
pub fn probe(cfg: &RunConfig, seed: u64) -> Result<ProbeReport> {
    let grid = build_grid(cfg)?;
    let data = initial_data(&grid, cfg);
    let f = forcing(&grid, cfg);
    let base = solve(cfg, &data, &f, None, None, &mut Vec::new())?;
    let phase = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..2.0 * PI);
    let dir = smooth_direction(&grid, cfg.steps(), cfg.time.dt, [1.0, 1.0, 1.0], phase)?;
    let deltas: Vec<f64> = (0..cfg.probe.levels)
        .map(|k| cfg.probe.delta / (1u64 << k) as f64)
        .collect();
    Ok(continuity_probe(base.solution(), &dir, &deltas, &f, &cfg.params, map_settings(cfg))?)
}

pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Report> {
    cfg.validate()?;
    let seed = seed()?;
    create_dir(out)?;
    let rep = probe(cfg, seed)?;
    let norm = rep.normalized_ratios();
    let rows: Vec<ProbeCsvRow> = rep
        .rows
        .iter()
        .enumerate()
        .map(|(k, row)| ProbeCsvRow {
            delta: row.delta,
            distance_u: row.output.u,
            distance_sigma: row.output.sigma,
            distance_tau: row.output.tau,
            distance: row.output.total,
            normalized_ratio: k.checked_sub(1).and_then(|j| norm.get(j).copied()),
        })
        .collect();
    write_rows(&out.join("probe.csv"), &rows)?;

    let spread = norm
        .iter()
        .map(|q| if q.is_finite() && *q > 0.0 { q.max(1.0 / q) } else { f64::INFINITY })
        .fold(1.0, f64::max);
    let mut r = Report::default();
    r.check(Check::at_most("continuity-linear-scaling", spread, LINEARITY_FACTOR));
    r.metric("seed", seed);
    r.metric("max_normalized_deviation", spread);
    r.line(format!("seed {seed}"));
    r.line(format!("{:>12} {:>14} {:>10}", "delta", "distance", "ratio"));
    for row in &rows {
        r.line(format!(
            "{:>12.4e} {:>14.6e} {:>10}",
            row.delta,
            row.distance,
            row.normalized_ratio.map_or("-".to_string(), |q| format!("{q:.4}"))
        ));
    }
    Ok(r)
}
