//! Registered initial-condition and forcing presets.
//!
//! Patterns are written in coordinates scaled to the unit cube, so a grid
//! of extent `L` sees the same shapes stretched by `L`.

use std::f64::consts::PI;
use std::sync::Arc;

use oldroyd_core::fields::{deformation, mean_zero_project, Grid, ScalarField, SymTensorField, VectorField};

use crate::config::RunConfig;
use crate::error::Result;

macro_rules! named_enum {
    ($name:ident { $($var:ident => $s:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($var),+ }

        impl $name {
            pub const NAMES: &'static str = concat!($($s, " "),+);

            pub fn name(self) -> &'static str {
                match self { $($name::$var => $s),+ }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s { $($s => Some($name::$var),)+ _ => None }
            }
        }
    };
}

named_enum!(VelocityIc { Zero => "zero", Vortex => "vortex" });
named_enum!(DensityIc { Zero => "zero", CosineDensity => "cosine-density" });
named_enum!(StressIc { Zero => "zero", ProportionalStress => "proportional-stress" });
named_enum!(ForcingPreset { Zero => "zero", Steady => "steady", Ramp => "ramp" });

fn unit(grid: &Grid, x: [f64; 3]) -> [f64; 3] {
    let mut y = [0.0; 3];
    for a in 0..grid.dim() {
        y[a] = x[a] / grid.extent(a);
    }
    y
}

/// `amp (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y))`, multiplied by
/// `sin(pi z)` in three dimensions. Divergence free and zero on the boundary.
pub fn vortex(grid: &Arc<Grid>, amp: f64) -> VectorField {
    let g = grid.clone();
    let three = g.dim() == 3;
    let mut u = VectorField::from_fn(grid, |x| {
        let y = unit(&g, x);
        let (sx, sy) = ((PI * y[0]).sin(), (PI * y[1]).sin());
        let gz = if three { (PI * y[2]).sin() } else { 1.0 };
        [
            amp * sx * sx * (2.0 * PI * y[1]).sin() * gz,
            -amp * (2.0 * PI * y[0]).sin() * sy * sy * gz,
            0.0,
        ]
    });
    u.enforce_dirichlet();
    u
}

/// `amp cos(2 pi x) cos(2 pi y) [cos(2 pi z)]`, projected to zero mean.
pub fn cosine_density(grid: &Arc<Grid>, amp: f64) -> ScalarField {
    let g = grid.clone();
    mean_zero_project(&ScalarField::from_fn(grid, |x| {
        let y = unit(&g, x);
        (0..g.dim()).map(|a| (2.0 * PI * y[a]).cos()).product::<f64>() * amp
    }))
}

/// `amp D[u]`.
pub fn proportional_stress(u: &VectorField, amp: f64) -> SymTensorField {
    let mut t = deformation(u);
    t.scale(amp);
    t
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: VectorField,
    pub sigma0: ScalarField,
    pub tau0: SymTensorField,
}

pub fn build_grid(cfg: &RunConfig) -> Result<Arc<Grid>> {
    let d = cfg.grid.dim;
    Ok(Arc::new(Grid::new(d, &vec![cfg.grid.n; d], &vec![cfg.grid.extent; d])?))
}

pub fn initial_data(grid: &Arc<Grid>, cfg: &RunConfig) -> InitialData {
    let ic = &cfg.ic;
    let u_shape = match ic.velocity {
        VelocityIc::Zero => VectorField::zeros_dirichlet(grid),
        VelocityIc::Vortex => vortex(grid, ic.velocity_amp),
    };
    let sigma0 = match ic.density {
        DensityIc::Zero => ScalarField::zeros(grid),
        DensityIc::CosineDensity => cosine_density(grid, ic.density_amp),
    };
    let tau0 = match ic.stress {
        StressIc::Zero => SymTensorField::zeros(grid),
        // proportional to the deformation of the unit vortex when the
        // velocity preset is zero, so the stress preset stands on its own
        StressIc::ProportionalStress => match ic.velocity {
            VelocityIc::Vortex => proportional_stress(&u_shape, ic.stress_amp),
            VelocityIc::Zero => proportional_stress(&vortex(grid, 1.0), ic.stress_amp),
        },
    };
    InitialData {
        u0: u_shape,
        sigma0,
        tau0,
    }
}

/// Forcing at the levels `t_n = n dt`, `n = 0..=steps`.
pub fn forcing(grid: &Arc<Grid>, cfg: &RunConfig) -> Vec<VectorField> {
    let steps = cfg.steps();
    let t_final = cfg.time.t_final;
    let amp = cfg.forcing.amp;
    let g = grid.clone();
    let shape = VectorField::from_fn(grid, |x| {
        let y = unit(&g, x);
        let b: f64 = (0..g.dim()).map(|a| (PI * y[a]).sin()).product();
        [amp * b, -amp * b * (PI * y[0]).cos(), 0.0]
    });
    (0..=steps)
        .map(|n| match cfg.forcing.preset {
            ForcingPreset::Zero => VectorField::zeros(grid),
            ForcingPreset::Steady => shape.clone(),
            ForcingPreset::Ramp => {
                let mut f = shape.clone();
                f.scale(n as f64 * cfg.time.dt / t_final);
                f
            }
        })
        .collect()
}

/// Smooth initial-data perturbation of size `amp` for the paired
/// uniqueness runs; keeps the velocity Dirichlet and the density mean-zero.
pub fn perturbation(grid: &Arc<Grid>, amp: f64) -> InitialData {
    let g = grid.clone();
    let mut u0 = VectorField::from_fn(grid, |x| {
        let y = unit(&g, x);
        let b: f64 = (0..g.dim()).map(|a| (PI * y[a]).sin()).product();
        [amp * b, amp * b, 0.0]
    });
    u0.enforce_dirichlet();
    let sigma0 = mean_zero_project(&ScalarField::from_fn(grid, |x| {
        let y = unit(&g, x);
        amp * (PI * y[0]).cos() * (PI * y[1]).cos()
    }));
    let tau0 = SymTensorField::identity(grid, amp);
    InitialData { u0, sigma0, tau0 }
}

impl InitialData {
    pub fn add(&self, other: &InitialData) -> InitialData {
        let mut out = self.clone();
        out.u0.axpy(1.0, &other.u0);
        out.sigma0.axpy(1.0, &other.sigma0);
        out.tau0.axpy(1.0, &other.tau0);
        out
    }
}
