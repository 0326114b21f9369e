//! Manufactured-solution studies on the unit square.
//!
//! * `velocity-space`: `u*(x, t) = e^{-t} S(x)` with
//!   `S = (sin(pi x) sin(pi y), sin(2 pi x) sin(pi y))`, forcing
//!   `alpha u*' + (1 - omega) A u*` evaluated analytically, `dt ~ h^2`.
//! * `velocity-time`: the same problem on a fixed grid, orders from
//!   successive halvings of `dt` (self-convergence removes the spatial error).
//! * `density-rest`: `w = 0` keeps `sigma` fixed exactly.
//! * `stress-relaxation-*`: `w = 0` against `tau0 e^{-t/We}`.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use oldroyd_core::fields::{l2, Field, Grid, ScalarField, SymTensorField, VectorField};
use oldroyd_core::rheology::FluidParams;
use oldroyd_core::transport::{step_density, step_stress, StressScheme};
use oldroyd_core::velocity::solve_velocity;

use super::{cg_settings, create_dir, parallel_map};
use crate::config::RunConfig;
use crate::error::Result;
use crate::ledger::{write_rows, MmsCsvRow};
use crate::presets::cosine_density;
use crate::report::{Check, Report};

const T_SPACE: f64 = 0.1;
const T_TIME: f64 = 0.5;
const T_TRANSPORT: f64 = 0.2;
/// Relative error below which a study is reported as exact.
const EXACT: f64 = 1e-12;

fn shape(x: [f64; 3]) -> [f64; 3] {
    let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
    [sx * sy, (2.0 * PI * x[0]).sin() * sy, 0.0]
}

/// `A S = -(Laplacian S + grad div S)`.
fn a_shape(x: [f64; 3]) -> [f64; 3] {
    let p2 = PI * PI;
    let (s1x, s1y) = ((PI * x[0]).sin(), (PI * x[1]).sin());
    let (c1x, c1y) = ((PI * x[0]).cos(), (PI * x[1]).cos());
    let (s2x, c2x) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[0]).cos());
    [
        3.0 * p2 * s1x * s1y - 2.0 * p2 * c2x * c1y,
        6.0 * p2 * s2x * s1y - p2 * c1x * c1y,
        0.0,
    ]
}

fn unit_grid(n: usize) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::unit(2, n)?))
}

/// Discrete velocity at `t_final` after `steps` backward-Euler steps.
fn velocity_run(n: usize, steps: usize, t_final: f64, params: &FluidParams, cfg: &RunConfig) -> Result<VectorField> {
    let g = unit_grid(n)?;
    let dt = t_final / steps as f64;
    let mut u0 = VectorField::from_fn(&g, shape);
    u0.enforce_dirichlet();
    let (alpha, visc) = (params.alpha, 1.0 - params.omega);
    let f: Vec<VectorField> = (0..=steps)
        .map(|k| {
            let e = (-(k as f64) * dt).exp();
            VectorField::from_fn(&g, |x| {
                let (s, a) = (shape(x), a_shape(x));
                [0, 1, 2].map(|i| e * (-alpha * s[i] + visc * a[i]))
            })
        })
        .collect();
    let traj = solve_velocity(&u0, &f, dt, params, cg_settings(cfg))?;
    Ok(traj.u.last().expect("non-empty trajectory").clone())
}

fn order(prev: f64, cur: f64) -> f64 {
    (prev / cur).log2()
}

struct Study {
    name: &'static str,
    rows: Vec<MmsCsvRow>,
    orders: Vec<f64>,
    exact: bool,
}

impl Study {
    fn new(name: &'static str) -> Self {
        Study {
            name,
            rows: Vec::new(),
            orders: Vec::new(),
            exact: false,
        }
    }

    fn push(&mut self, n: usize, steps: usize, error: f64, scale: f64) {
        let exact = error <= EXACT * scale;
        let order = if exact {
            "exact".to_string()
        } else if let Some(prev) = self.rows.last() {
            let o = order(prev.error, error);
            self.orders.push(o);
            format!("{o:.3}")
        } else {
            String::new()
        };
        self.exact = self.rows.iter().all(|r| r.order == "exact") && exact;
        self.rows.push(MmsCsvRow {
            study: self.name.to_string(),
            n,
            steps,
            error,
            order,
        });
    }

    fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn velocity_space(cfg: &RunConfig, jobs: usize) -> Result<Study> {
    let params = &cfg.params;
    let n0 = cfg.mms.grids[0];
    let runs: Vec<(usize, usize)> = cfg
        .mms
        .grids
        .iter()
        .map(|&n| (n, 16 * (n / n0) * (n / n0)))
        .collect();
    let results = parallel_map(jobs, &runs, |&(n, steps)| -> Result<f64> {
        let u = velocity_run(n, steps, T_SPACE, params, cfg)?;
        let g = u.grid().clone();
        let e = (-T_SPACE).exp();
        let mut exact = VectorField::from_fn(&g, |x| shape(x).map(|s| e * s));
        exact.enforce_dirichlet();
        let mut d = u;
        d.axpy(-1.0, &exact);
        Ok(l2(&d))
    });
    let mut s = Study::new("velocity-space");
    for ((n, steps), err) in runs.into_iter().zip(results) {
        s.push(n, steps, err?, 1.0);
    }
    Ok(s)
}

fn velocity_time(cfg: &RunConfig, jobs: usize) -> Result<Study> {
    let n = cfg.mms.grids[cfg.mms.grids.len() / 2];
    let steps: Vec<usize> = (0..=cfg.mms.grids.len()).map(|k| 5 << k).collect();
    let runs = parallel_map(jobs, &steps, |&m| velocity_run(n, m, T_TIME, &cfg.params, cfg));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut s = Study::new("velocity-time");
    for k in 1..runs.len() {
        let mut d = runs[k - 1].clone();
        d.axpy(-1.0, &runs[k]);
        s.push(n, steps[k - 1], l2(&d), 1.0);
    }
    Ok(s)
}

fn density_rest(cfg: &RunConfig) -> Result<Study> {
    let mut s = Study::new("density-rest");
    for &n in &cfg.mms.grids {
        let g = unit_grid(n)?;
        let s0: ScalarField = cosine_density(&g, 1.0);
        let w = VectorField::zeros_dirichlet(&g);
        let steps = 20;
        let dt = T_TRANSPORT / steps as f64;
        let mut sig = s0.clone();
        for _ in 0..steps {
            sig = step_density(&sig, &w, dt, &cfg.params)?.0;
        }
        sig.axpy(-1.0, &s0);
        s.push(n, steps, l2(&sig), l2(&s0));
    }
    Ok(s)
}

fn relaxation(cfg: &RunConfig, scheme: StressScheme, name: &'static str) -> Result<Study> {
    let n = cfg.mms.grids[0];
    let g = unit_grid(n)?;
    let we = cfg.params.we;
    let t0 = SymTensorField::from_fn(&g, |x| {
        let a = (PI * x[0]).sin() * (PI * x[1]).cos();
        [[a, 0.5 * a, 0.0], [0.5 * a, -a, 0.0], [0.0, 0.0, 0.0]]
    });
    let w = VectorField::zeros_dirichlet(&g);
    let t_final = 2.0 * we;
    let mut s = Study::new(name);
    for k in 0..cfg.mms.grids.len() {
        let steps = 10 << k;
        let dt = t_final / steps as f64;
        let mut tau = t0.clone();
        for _ in 0..steps {
            tau = step_stress(&tau, &w, dt, &cfg.params, scheme)?;
        }
        let mut exact = t0.clone();
        exact.scale((-t_final / we).exp());
        tau.axpy(-1.0, &exact);
        s.push(n, steps, l2(&tau), l2(&exact));
    }
    Ok(s)
}

/// Runs every study, writes `mms.csv` and checks the observed orders.
pub fn execute(cfg: &RunConfig, out: &Path, jobs: usize) -> Result<Report> {
    cfg.validate()?;
    create_dir(out)?;
    let studies = vec![
        velocity_space(cfg, jobs)?,
        velocity_time(cfg, jobs)?,
        density_rest(cfg)?,
        relaxation(cfg, StressScheme::Exponential, "stress-relaxation-exponential")?,
        relaxation(cfg, StressScheme::BackwardEuler, "stress-relaxation-backward-euler")?,
    ];
    let mut r = Report::default();
    r.line(format!("{:<34} {:>5} {:>6} {:>12} {:>8}", "study", "n", "steps", "error", "order"));
    for s in &studies {
        for row in &s.rows {
            r.line(format!(
                "{:<34} {:>5} {:>6} {:>12.4e} {:>8}",
                row.study, row.n, row.steps, row.error, row.order
            ));
        }
    }
    let min = |name: &str| studies.iter().find(|s| s.name == name).map_or(f64::NAN, Study::min_order);
    let exact = |name: &str| studies.iter().any(|s| s.name == name && s.exact);
    r.check(Check::at_least("mms-velocity-space-order", min("velocity-space"), 1.8));
    r.check(Check::at_least("mms-velocity-time-order", min("velocity-time"), 0.9));
    r.check(Check::flag("mms-density-rest-exact", exact("density-rest")));
    r.check(Check::flag("mms-stress-exponential-exact", exact("stress-relaxation-exponential")));
    r.check(Check::at_least(
        "mms-stress-backward-euler-order",
        min("stress-relaxation-backward-euler"),
        0.9,
    ));
    for s in &studies {
        r.metric(&format!("{}_min_order", s.name), if s.orders.is_empty() { None } else { Some(s.min_order()) });
        r.metric(&format!("{}_exact", s.name), s.exact);
    }
    let rows: Vec<MmsCsvRow> = studies.into_iter().flat_map(|s| s.rows).collect();
    write_rows(&out.join("mms.csv"), &rows)?;
    Ok(r)
}
