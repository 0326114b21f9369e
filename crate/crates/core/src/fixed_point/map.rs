use super::triple::{diff_sq, IterTriple};
use crate::error::{Error, Result};
use crate::fields::{convective, div_tensor, gradient, same_grid, Field, ScalarField, SymTensorField, VectorField};
use crate::linalg::CgSettings;
use crate::rheology::{source_f, FluidParams};
use crate::transport::{
    step_density_on, step_stress_on, trace, DensityStepReport, StressScheme,
};
use crate::velocity::{step_velocity, VelocityStepReport, VelocityTrajectory};

/// Numerical choices shared by every application of the map.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MapSettings {
    pub cg: CgSettings,
    pub stress: StressScheme,
}

/// Output of one application of the map together with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct MapOutput {
    pub triple: IterTriple,
    /// The velocity part with the momentum forcing used at each level.
    pub velocity: VelocityTrajectory,
    pub density: Vec<DensityStepReport>,
}

/// Momentum forcing assembled from a frozen state:
/// `F(w, pi, psi) - alpha (w.grad) w - grad pi + div psi`.
pub fn momentum_forcing(
    w: &VectorField,
    pi: &ScalarField,
    psi: &SymTensorField,
    f: &VectorField,
    params: &FluidParams,
) -> Result<VectorField> {
    same_grid(w.grid(), psi.grid())?;
    let mut out = source_f(w, pi, f, params)?;
    out.axpy(-params.alpha, &convective(w, w)?);
    out.axpy(-1.0, &gradient(pi));
    out.axpy(1.0, &div_tensor(psi));
    Ok(out)
}

fn check_forcing(input: &IterTriple, f: &[VectorField]) -> Result<()> {
    if f.len() != input.w.len() {
        return Err(Error::ShapeMismatch(format!(
            "forcing has {} levels, trajectory {}",
            f.len(),
            input.w.len()
        )));
    }
    Ok(())
}

/// Applies the map `(w, pi, psi) -> (u, sigma, tau)` over the whole window.
///
/// Step `n -> n+1` solves the backward-Euler velocity problem with the
/// forcing assembled from the input at level `n+1`, and transports density
/// and stress along the characteristics of `w` at level `n+1`. The output
/// starts from the input's initial data.
pub fn picard_map(
    input: &IterTriple,
    f: &[VectorField],
    params: &FluidParams,
    settings: MapSettings,
) -> Result<MapOutput> {
    check_forcing(input, f)?;
    let steps = input.steps();
    let dt = input.dt;
    let mut u = Vec::with_capacity(steps + 1);
    let mut sigma = Vec::with_capacity(steps + 1);
    let mut tau = Vec::with_capacity(steps + 1);
    let mut forcing = Vec::with_capacity(steps + 1);
    let mut vreports: Vec<VelocityStepReport> = Vec::with_capacity(steps);
    let mut dreports = Vec::with_capacity(steps);
    u.push(input.w[0].clone());
    sigma.push(input.pi[0].clone());
    tau.push(input.psi[0].clone());
    forcing.push(
        momentum_forcing(&input.w[0], &input.pi[0], &input.psi[0], &f[0], params)
            .map_err(|e| e.at_step(0))?,
    );
    for n in 0..steps {
        let at = |e: Error| e.at_step(n + 1);
        let w = &input.w[n + 1];
        let rhs = momentum_forcing(w, &input.pi[n + 1], &input.psi[n + 1], &f[n + 1], params)
            .map_err(at)?;
        let (un, rep) = step_velocity(&u[n], &rhs, dt, params, settings.cg).map_err(at)?;
        let map = trace(w, dt).map_err(at)?;
        let (sn, drep) = step_density_on(&map, &sigma[n], w, params).map_err(at)?;
        let tn = step_stress_on(&map, &tau[n], w, params, settings.stress).map_err(at)?;
        u.push(un);
        sigma.push(sn);
        tau.push(tn);
        forcing.push(rhs);
        vreports.push(rep);
        dreports.push(drep);
    }
    let velocity = VelocityTrajectory {
        dt,
        u: u.clone(),
        forcing,
        reports: vreports,
    };
    Ok(MapOutput {
        triple: IterTriple::new(dt, u, sigma, tau)?,
        velocity,
        density: dreports,
    })
}

/// Per-equation residual of the coupled discrete system, in update form:
/// each level is compared with the single step that the scheme would take
/// from the previous level of the same trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoupledResidual {
    pub momentum: f64,
    pub density: f64,
    pub stress: f64,
}

impl CoupledResidual {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.density).max(self.stress)
    }
}

pub fn coupled_residual(
    sol: &IterTriple,
    f: &[VectorField],
    params: &FluidParams,
    settings: MapSettings,
) -> Result<CoupledResidual> {
    check_forcing(sol, f)?;
    let dt = sol.dt;
    let mut r = CoupledResidual::default();
    for n in 0..sol.steps() {
        let at = |e: Error| e.at_step(n + 1);
        let (w, pi, psi) = (&sol.w[n + 1], &sol.pi[n + 1], &sol.psi[n + 1]);
        let rhs = momentum_forcing(w, pi, psi, &f[n + 1], params).map_err(at)?;
        let (u, _) = step_velocity(&sol.w[n], &rhs, dt, params, settings.cg).map_err(at)?;
        let map = trace(w, dt).map_err(at)?;
        let (s, _) = step_density_on(&map, &sol.pi[n], w, params).map_err(at)?;
        let t = step_stress_on(&map, &sol.psi[n], w, params, settings.stress).map_err(at)?;
        r.momentum = r.momentum.max(diff_sq(&u, w).sqrt());
        r.density = r.density.max(diff_sq(&s, pi).sqrt());
        r.stress = r.stress.max(diff_sq(&t, psi).sqrt());
    }
    Ok(r)
}
