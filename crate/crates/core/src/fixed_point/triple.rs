use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::norms::l2_sq;
use crate::fields::{Field, Grid, ScalarField, SymTensorField, VectorField};
use crate::rheology::FluidParams;

/// Candidate trajectory `(w, pi, psi)` on the levels `t_n = n dt`,
/// `n = 0..=N`.
#[derive(Debug, Clone)]
pub struct IterTriple {
    pub dt: f64,
    pub w: Vec<VectorField>,
    pub pi: Vec<ScalarField>,
    pub psi: Vec<SymTensorField>,
}

/// Distance in `C([0,T]; L2)^3`. The components are plain sup-in-time `L2`
/// distances; the combined value uses the energy weights of the system,
/// `sup_n (alpha |du|^2 + (eps^2/alpha) |dsigma|^2 + (We/(2 omega)) |dtau|^2)^{1/2}`,
/// which keeps the velocity and the `eps^-2`-scaled density on one scale.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct YDistance {
    pub u: f64,
    pub sigma: f64,
    pub tau: f64,
    pub total: f64,
}

/// Weights of the combined distance.
pub fn energy_weights(params: &FluidParams) -> [f64; 3] {
    [
        params.alpha,
        params.eps * params.eps / params.alpha,
        params.we / (2.0 * params.omega),
    ]
}

impl IterTriple {
    pub fn new(
        dt: f64,
        w: Vec<VectorField>,
        pi: Vec<ScalarField>,
        psi: Vec<SymTensorField>,
    ) -> Result<Self> {
        if w.is_empty() || w.len() != pi.len() || w.len() != psi.len() {
            return Err(Error::ShapeMismatch(format!(
                "trajectory lengths differ: w {}, pi {}, psi {}",
                w.len(),
                pi.len(),
                psi.len()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
        }
        if let Some(n) = w.iter().position(|v| !v.is_dirichlet()) {
            return Err(Error::NotDirichlet(format!("w at level {n}")));
        }
        Ok(Self { dt, w, pi, psi })
    }

    /// Constant-in-time extension of the initial data over `steps` steps.
    pub fn constant(
        u0: &VectorField,
        sigma0: &ScalarField,
        tau0: &SymTensorField,
        steps: usize,
        dt: f64,
    ) -> Result<Self> {
        Self::new(
            dt,
            vec![u0.clone(); steps + 1],
            vec![sigma0.clone(); steps + 1],
            vec![tau0.clone(); steps + 1],
        )
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.w[0].grid()
    }

    pub fn steps(&self) -> usize {
        self.w.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn distance(&self, other: &IterTriple, params: &FluidParams) -> Result<YDistance> {
        let [cu, cs, ct] = energy_weights(params);
        if self.w.len() != other.w.len() {
            return Err(Error::ShapeMismatch(format!(
                "windows of {} and {} levels",
                self.w.len(),
                other.w.len()
            )));
        }
        let mut d = YDistance::default();
        for n in 0..self.w.len() {
            let du = diff_sq(&self.w[n], &other.w[n]);
            let ds = diff_sq(&self.pi[n], &other.pi[n]);
            let dt = diff_sq(&self.psi[n], &other.psi[n]);
            d.u = d.u.max(du.sqrt());
            d.sigma = d.sigma.max(ds.sqrt());
            d.tau = d.tau.max(dt.sqrt());
            d.total = d.total.max((cu * du + cs * ds + ct * dt).sqrt());
        }
        Ok(d)
    }

    /// Combined distance to zero.
    pub fn size(&self, params: &FluidParams) -> f64 {
        let [cu, cs, ct] = energy_weights(params);
        (0..self.w.len())
            .map(|n| {
                (cu * l2_sq(&self.w[n]) + cs * l2_sq(&self.pi[n]) + ct * l2_sq(&self.psi[n])).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn diff_sq<F: Field>(a: &F, b: &F) -> f64 {
    let g = a.grid();
    let w = g.weights();
    let mut s = 0.0;
    for k in 0..a.components().len() {
        let m = a.component_multiplicity(k);
        let (x, y) = (&a.components()[k], &b.components()[k]);
        let mut acc = 0.0;
        for i in 0..x.len() {
            let d = x[i] - y[i];
            acc += w[i] * d * d;
        }
        s += m * acc;
    }
    s
}
