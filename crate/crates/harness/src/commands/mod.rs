//! The four CLI commands. Each returns a [`Report`]; writing the summary
//! and choosing the exit status is left to [`finish`].

pub mod mms;
pub mod probe;
pub mod run;
pub mod uniqueness;

use std::path::Path;

use oldroyd_core::fields::{Snapshot, VectorField};
use oldroyd_core::fixed_point::{
    iterate_from, size_budgets, Budgets, Converged, FixedPointSettings, IterTriple, MapSettings,
};
use oldroyd_core::linalg::CgSettings;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::ledger::ConvergenceRow;
use crate::presets::InitialData;
use crate::report::{Report, Summary};

pub fn map_settings(cfg: &RunConfig) -> MapSettings {
    MapSettings {
        cg: cg_settings(cfg),
        stress: cfg.solver.stress_scheme,
    }
}

pub fn cg_settings(cfg: &RunConfig) -> CgSettings {
    CgSettings {
        tol: cfg.solver.tol_lin,
        max_iter: cfg.solver.max_lin_iter,
    }
}

/// Budgets from the config, or sized from the data for whichever is unset.
pub fn budgets(cfg: &RunConfig, data: &InitialData, f: &[VectorField]) -> Result<Budgets> {
    let sized = match (cfg.budget.b1, cfg.budget.b2) {
        (Some(b1), Some(b2)) => return Ok(Budgets { b1, b2 }),
        _ => size_budgets(
            &data.u0,
            &data.sigma0,
            &data.tau0,
            f,
            cfg.time.dt,
            &cfg.params,
            cfg.budget.constants,
            cg_settings(cfg),
        )?
        .budgets,
    };
    Ok(Budgets {
        b1: cfg.budget.b1.unwrap_or(sized.b1),
        b2: cfg.budget.b2.unwrap_or(sized.b2),
    })
}

/// Fixed-point solve from the constant extension of `data` (or `start`),
/// appending one row per iteration to `history` even when it fails.
pub fn solve(
    cfg: &RunConfig,
    data: &InitialData,
    f: &[VectorField],
    budgets: Option<Budgets>,
    start: Option<IterTriple>,
    history: &mut Vec<ConvergenceRow>,
) -> Result<Converged> {
    let start = match start {
        Some(s) => s,
        None => IterTriple::constant(&data.u0, &data.sigma0, &data.tau0, cfg.steps(), cfg.time.dt)?,
    };
    let settings = FixedPointSettings {
        tol: cfg.solver.tol_fp,
        max_iter: cfg.solver.max_iter,
        map: map_settings(cfg),
        budgets,
    };
    Ok(iterate_from(start, f, &cfg.params, settings, |r| {
        history.push(ConvergenceRow::from(r))
    })?)
}

pub fn write_snapshots(dir: &Path, sol: &IterTriple) -> Result<()> {
    let snap = dir.join("snapshots");
    std::fs::create_dir_all(&snap).map_err(|e| HarnessError::io(&snap, e))?;
    let last = sol.steps();
    let t = sol.t_final();
    let items: [(&str, Snapshot); 6] = [
        ("u_initial", Snapshot::of(&sol.w[0], 0.0)),
        ("sigma_initial", Snapshot::of(&sol.pi[0], 0.0)),
        ("tau_initial", Snapshot::of(&sol.psi[0], 0.0)),
        ("u_final", Snapshot::of(&sol.w[last], t)),
        ("sigma_final", Snapshot::of(&sol.pi[last], t)),
        ("tau_final", Snapshot::of(&sol.psi[last], t)),
    ];
    for (name, s) in items {
        let path = snap.join(format!("{name}.txt"));
        let file = std::fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        let mut w = std::io::BufWriter::new(file);
        s.write(&mut w)?;
        std::io::Write::flush(&mut w).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Runs `jobs` closures at a time on scoped threads, keeping input order.
pub fn parallel_map<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut out = Vec::with_capacity(items.len());
    for chunk in items.chunks(jobs) {
        let res: Vec<R> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|it| s.spawn(|| f(it))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker thread panicked"))
                .collect()
        });
        out.extend(res);
    }
    out
}

/// Writes `summary.json` into `dir` and returns the process exit status.
pub fn finish(command: &str, dir: &Path, outcome: &Result<Report>) -> i32 {
    let summary = Summary::from_outcome(command, outcome);
    match outcome {
        Ok(r) => {
            for l in &r.lines {
                println!("{l}");
            }
            for c in r.checks.iter().filter(|c| !c.pass) {
                eprintln!("invariant violated: {} = {:.6e} (bound {:.6e})", c.name, c.value, c.bound);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    if let Err(e) = summary.write(dir) {
        eprintln!("error: could not write summary: {e}");
        if summary.exit_code == 0 {
            return 1;
        }
    }
    summary.exit_code
}
