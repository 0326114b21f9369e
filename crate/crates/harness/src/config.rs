//! Run configuration in a flat `section.key = value` text format.
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are
//! errors; missing keys take the values of [`RunConfig::default`]. Lists are
//! comma separated.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use oldroyd_core::fields::MIN_CELLS;
use oldroyd_core::fixed_point::BudgetConstants;
use oldroyd_core::rheology::{FluidParams, PressureLaw, SoundSpeedTable};
use oldroyd_core::transport::StressScheme;

use crate::error::{HarnessError, Result};
use crate::presets::{DensityIc, ForcingPreset, StressIc, VelocityIc};

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub dim: usize,
    /// Cells per axis.
    pub n: usize,
    /// Side length of the cube.
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub t_final: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol_lin: f64,
    pub max_lin_iter: usize,
    pub tol_fp: f64,
    pub max_iter: usize,
    pub stress_scheme: StressScheme,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcConfig {
    pub velocity: VelocityIc,
    pub velocity_amp: f64,
    pub density: DensityIc,
    pub density_amp: f64,
    pub stress: StressIc,
    pub stress_amp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingConfig {
    pub preset: ForcingPreset,
    pub amp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetConfig {
    pub constants: BudgetConstants,
    /// Explicit budgets; sized from the data when absent.
    pub b1: Option<f64>,
    pub b2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessConfig {
    /// Young's-inequality parameter of the Gronwall rate.
    pub delta: f64,
    /// Size of the initial-data perturbation of the second run.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Largest perturbation size; the probe halves it `levels - 1` times.
    pub delta: f64,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsConfig {
    /// Dyadic sequence of cells per axis.
    pub grids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub params: FluidParams,
    pub time: TimeConfig,
    pub solver: SolverConfig,
    pub ic: IcConfig,
    pub forcing: ForcingConfig,
    pub budget: BudgetConfig,
    pub uniqueness: UniquenessConfig,
    pub probe: ProbeConfig,
    pub mms: MmsConfig,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig {
                dim: 2,
                n: 32,
                extent: 1.0,
            },
            params: FluidParams::default(),
            time: TimeConfig {
                t_final: 0.05,
                dt: 1e-3,
            },
            solver: SolverConfig {
                tol_lin: 1e-10,
                max_lin_iter: 10_000,
                tol_fp: 1e-8,
                max_iter: 50,
                stress_scheme: StressScheme::default(),
            },
            ic: IcConfig {
                velocity: VelocityIc::Vortex,
                velocity_amp: 0.1,
                density: DensityIc::CosineDensity,
                density_amp: 0.1,
                stress: StressIc::ProportionalStress,
                stress_amp: 0.1,
            },
            forcing: ForcingConfig {
                preset: ForcingPreset::Zero,
                amp: 0.0,
            },
            budget: BudgetConfig {
                constants: BudgetConstants::default(),
                b1: None,
                b2: None,
            },
            uniqueness: UniquenessConfig {
                delta: 1.0,
                amplitude: 1e-4,
            },
            probe: ProbeConfig {
                delta: 1e-3,
                levels: 3,
            },
            mms: MmsConfig {
                grids: vec![16, 32, 64],
            },
            output: PathBuf::from("out"),
        }
    }
}

/// Shortest text that parses back to the same `f64`.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")
}

struct Entries {
    path: String,
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn err(&self, line: usize, msg: String) -> HarnessError {
        HarnessError::Syntax {
            path: self.path.clone(),
            line,
            msg,
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, slot: &mut T) -> Result<()> {
        if let Some((line, v)) = self.take(key) {
            *slot = v
                .parse()
                .map_err(|_| self.err(line, format!("cannot parse `{v}` for {key}")))?;
        }
        Ok(())
    }

    fn optional(&mut self, key: &str, slot: &mut Option<f64>) -> Result<()> {
        if let Some((line, v)) = self.take(key) {
            *slot = Some(
                v.parse()
                    .map_err(|_| self.err(line, format!("cannot parse `{v}` for {key}")))?,
            );
        }
        Ok(())
    }

    fn named<T>(&mut self, key: &str, slot: &mut T, parse: impl Fn(&str) -> Option<T>, known: &str) -> Result<()> {
        if let Some((line, v)) = self.take(key) {
            *slot = parse(&v).ok_or_else(|| {
                self.err(line, format!("unknown value `{v}` for {key}; expected one of {known}"))
            })?;
        }
        Ok(())
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| self.err(line, format!("cannot parse `{}` in {key}", s.trim())))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse_named(&text, &path.display().to_string())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_named(text, "<config>")
    }

    fn parse_named(text: &str, path: &str) -> Result<Self> {
        let mut e = Entries {
            path: path.to_string(),
            map: BTreeMap::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| e.err(i + 1, format!("expected `section.key = value`, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if !k.contains('.') {
                return Err(e.err(i + 1, format!("key `{k}` has no section")));
            }
            if let Some((first, _)) = e.map.insert(k.to_string(), (i + 1, v.to_string())) {
                return Err(e.err(i + 1, format!("key `{k}` repeats line {first}")));
            }
        }

        let mut c = RunConfig::default();
        e.parsed("grid.dim", &mut c.grid.dim)?;
        e.parsed("grid.n", &mut c.grid.n)?;
        e.parsed("grid.extent", &mut c.grid.extent)?;

        let p = &mut c.params;
        e.parsed("params.eps", &mut p.eps)?;
        e.parsed("params.omega", &mut p.omega)?;
        e.parsed("params.we", &mut p.we)?;
        e.parsed("params.alpha", &mut p.alpha)?;
        e.parsed("params.a", &mut p.a)?;
        e.parsed("params.m1", &mut p.m1)?;
        e.parsed("params.m_upper", &mut p.m_upper)?;
        let mut kind = p.pressure.kind().to_string();
        let kind_line = e.map.get("params.pressure").map_or(0, |(l, _)| *l);
        e.parsed("params.pressure", &mut kind)?;
        let mut cs = 1.0;
        let mut kappa = 1.0;
        e.parsed("params.cs", &mut cs)?;
        e.parsed("params.kappa", &mut kappa)?;
        let rho: Option<Vec<f64>> = e.list("params.table_rho")?;
        let value: Option<Vec<f64>> = e.list("params.table_value")?;
        p.pressure = match kind.as_str() {
            "linear" => PressureLaw::Linear,
            "isothermal" => PressureLaw::Isothermal { cs },
            "quadratic" => PressureLaw::Quadratic { kappa },
            "table" => {
                let (Some(rho), Some(value)) = (rho, value) else {
                    return Err(e.err(kind_line, "a table pressure law needs params.table_rho and params.table_value".into()));
                };
                PressureLaw::Table(SoundSpeedTable::new(rho, value)?)
            }
            other => {
                return Err(e.err(
                    kind_line,
                    format!("unknown pressure law `{other}`; expected linear, isothermal, quadratic or table"),
                ))
            }
        };

        e.parsed("time.t", &mut c.time.t_final)?;
        e.parsed("time.dt", &mut c.time.dt)?;

        e.parsed("solver.tol_lin", &mut c.solver.tol_lin)?;
        e.parsed("solver.max_lin_iter", &mut c.solver.max_lin_iter)?;
        e.parsed("solver.tol_fp", &mut c.solver.tol_fp)?;
        e.parsed("solver.max_iter", &mut c.solver.max_iter)?;
        e.named(
            "solver.stress_scheme",
            &mut c.solver.stress_scheme,
            StressScheme::parse,
            "exponential, backward-euler",
        )?;

        e.named("ic.velocity", &mut c.ic.velocity, VelocityIc::parse, VelocityIc::NAMES)?;
        e.parsed("ic.velocity_amp", &mut c.ic.velocity_amp)?;
        e.named("ic.density", &mut c.ic.density, DensityIc::parse, DensityIc::NAMES)?;
        e.parsed("ic.density_amp", &mut c.ic.density_amp)?;
        e.named("ic.stress", &mut c.ic.stress, StressIc::parse, StressIc::NAMES)?;
        e.parsed("ic.stress_amp", &mut c.ic.stress_amp)?;

        e.named("forcing.preset", &mut c.forcing.preset, ForcingPreset::parse, ForcingPreset::NAMES)?;
        e.parsed("forcing.amp", &mut c.forcing.amp)?;

        let bc = &mut c.budget.constants;
        e.parsed("budget.c2", &mut bc.c2)?;
        e.parsed("budget.c3", &mut bc.c3)?;
        e.parsed("budget.c5", &mut bc.c5)?;
        e.parsed("budget.c6", &mut bc.c6)?;
        e.parsed("budget.w_c", &mut bc.w_c)?;
        e.parsed("budget.margin", &mut bc.margin)?;
        e.optional("budget.b1", &mut c.budget.b1)?;
        e.optional("budget.b2", &mut c.budget.b2)?;

        e.parsed("uniqueness.delta", &mut c.uniqueness.delta)?;
        e.parsed("uniqueness.amplitude", &mut c.uniqueness.amplitude)?;
        e.parsed("probe.delta", &mut c.probe.delta)?;
        e.parsed("probe.levels", &mut c.probe.levels)?;
        if let Some(g) = e.list("mms.grids")? {
            c.mms.grids = g;
        }
        if let Some((_, v)) = e.take("output.dir") {
            c.output = PathBuf::from(v);
        }

        if let Some((k, (line, _))) = e.map.iter().next() {
            return Err(e.err(*line, format!("unknown key `{k}`")));
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("grid.dim", self.grid.dim.to_string());
        put("grid.n", self.grid.n.to_string());
        put("grid.extent", num(self.grid.extent));
        let p = &self.params;
        put("params.eps", num(p.eps));
        put("params.omega", num(p.omega));
        put("params.we", num(p.we));
        put("params.alpha", num(p.alpha));
        put("params.a", num(p.a));
        put("params.m1", num(p.m1));
        put("params.m_upper", num(p.m_upper));
        put("params.pressure", p.pressure.kind().to_string());
        match &p.pressure {
            PressureLaw::Linear => {}
            PressureLaw::Isothermal { cs } => put("params.cs", num(*cs)),
            PressureLaw::Quadratic { kappa } => put("params.kappa", num(*kappa)),
            PressureLaw::Table(t) => {
                let (rho, value) = t.samples();
                put("params.table_rho", list(rho));
                put("params.table_value", list(value));
            }
        }
        put("time.t", num(self.time.t_final));
        put("time.dt", num(self.time.dt));
        put("solver.tol_lin", num(self.solver.tol_lin));
        put("solver.max_lin_iter", self.solver.max_lin_iter.to_string());
        put("solver.tol_fp", num(self.solver.tol_fp));
        put("solver.max_iter", self.solver.max_iter.to_string());
        put("solver.stress_scheme", self.solver.stress_scheme.name().to_string());
        put("ic.velocity", self.ic.velocity.name().to_string());
        put("ic.velocity_amp", num(self.ic.velocity_amp));
        put("ic.density", self.ic.density.name().to_string());
        put("ic.density_amp", num(self.ic.density_amp));
        put("ic.stress", self.ic.stress.name().to_string());
        put("ic.stress_amp", num(self.ic.stress_amp));
        put("forcing.preset", self.forcing.preset.name().to_string());
        put("forcing.amp", num(self.forcing.amp));
        let bc = &self.budget.constants;
        put("budget.c2", num(bc.c2));
        put("budget.c3", num(bc.c3));
        put("budget.c5", num(bc.c5));
        put("budget.c6", num(bc.c6));
        put("budget.w_c", num(bc.w_c));
        put("budget.margin", num(bc.margin));
        if let Some(b) = self.budget.b1 {
            put("budget.b1", num(b));
        }
        if let Some(b) = self.budget.b2 {
            put("budget.b2", num(b));
        }
        put("uniqueness.delta", num(self.uniqueness.delta));
        put("uniqueness.amplitude", num(self.uniqueness.amplitude));
        put("probe.delta", num(self.probe.delta));
        put("probe.levels", self.probe.levels.to_string());
        put(
            "mms.grids",
            self.mms.grids.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "),
        );
        put("output.dir", self.output.display().to_string());
        s
    }

    /// Number of time steps `T / dt`.
    pub fn steps(&self) -> usize {
        (self.time.t_final / self.time.dt).round() as usize
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // negated form also rejects NaN
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        self.params.validate()?;
        if !(2..=3).contains(&self.grid.dim) {
            return bad(format!("grid.dim = {} must be 2 or 3", self.grid.dim));
        }
        if self.grid.n < MIN_CELLS {
            return bad(format!("grid.n = {} must be at least {MIN_CELLS}", self.grid.n));
        }
        if !(self.grid.extent > 0.0 && self.grid.extent.is_finite()) {
            return bad(format!("grid.extent = {} must be positive", self.grid.extent));
        }
        let (t, dt) = (self.time.t_final, self.time.dt);
        if !(dt > 0.0 && t.is_finite() && dt <= t) {
            return bad(format!("time step must satisfy 0 < dt <= T, got dt = {dt}, T = {t}"));
        }
        let steps = t / dt;
        if (steps - steps.round()).abs() > 1e-9 * steps {
            return bad(format!("T = {t} is not a whole number of steps dt = {dt}"));
        }
        for (name, v) in [("solver.tol_lin", self.solver.tol_lin), ("solver.tol_fp", self.solver.tol_fp)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if self.solver.max_iter == 0 || self.solver.max_lin_iter == 0 {
            return bad("iteration limits must be positive".into());
        }
        for (name, v) in [
            ("ic.velocity_amp", self.ic.velocity_amp),
            ("ic.density_amp", self.ic.density_amp),
            ("ic.stress_amp", self.ic.stress_amp),
            ("forcing.amp", self.forcing.amp),
            ("uniqueness.amplitude", self.uniqueness.amplitude),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} = {v} must be finite"));
            }
        }
        let bc = &self.budget.constants;
        if [bc.c2, bc.c3, bc.c5, bc.c6, bc.margin].iter().any(|c| !(*c > 0.0 && c.is_finite()))
            || !(bc.w_c >= 0.0)
        {
            return bad("budget constants must be positive".into());
        }
        for b in [self.budget.b1, self.budget.b2].into_iter().flatten() {
            if !(b > 0.0) {
                return bad(format!("budget {b} must be positive"));
            }
        }
        if !(self.uniqueness.delta > 0.0) {
            return bad(format!("uniqueness.delta = {} must be positive", self.uniqueness.delta));
        }
        if !(self.probe.delta > 0.0 && self.probe.delta.is_finite()) || self.probe.levels < 2 {
            return bad("probe needs delta > 0 and at least two levels".into());
        }
        let g = &self.mms.grids;
        if g.len() < 3 || g[0] < MIN_CELLS || g.windows(2).any(|w| w[1] != 2 * w[0]) {
            return bad(format!("mms.grids = {g:?} must be at least three dyadic refinements"));
        }
        Ok(())
    }
}
