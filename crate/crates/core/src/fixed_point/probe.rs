use std::f64::consts::PI;
use std::sync::Arc;

use super::map::{picard_map, MapSettings};
use super::triple::{IterTriple, YDistance};
use crate::error::Result;
use crate::fields::{Grid, ScalarField, SymTensorField, VectorField};
use crate::rheology::FluidParams;

/// Smooth perturbation direction vanishing at `t = 0` and, for the
/// velocity, on the boundary. `weights` scales the `(w, pi, psi)` parts and
/// `phase` shifts the spatial pattern.
pub fn smooth_direction(
    grid: &Arc<Grid>,
    steps: usize,
    dt: f64,
    weights: [f64; 3],
    phase: f64,
) -> Result<IterTriple> {
    let t_final = (steps as f64 * dt).max(f64::MIN_POSITIVE);
    let dim = grid.dim();
    let bump = move |x: [f64; 3]| -> f64 {
        (0..dim).map(|a| (PI * x[a]).sin()).product::<f64>()
    };
    let mut w = Vec::with_capacity(steps + 1);
    let mut pi = Vec::with_capacity(steps + 1);
    let mut psi = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        let s = n as f64 * dt / t_final;
        let mut wn = VectorField::from_fn(grid, |x| {
            let b = bump(x) * weights[0] * s;
            let c = (2.0 * PI * x[1] + phase).cos();
            [b * c, -b * (2.0 * PI * x[0] + phase).sin(), 0.5 * b]
        });
        wn.enforce_dirichlet();
        let pn = crate::fields::mean_zero_project(&ScalarField::from_fn(grid, |x| {
            weights[1] * s * (2.0 * PI * x[0] + phase).cos() * (PI * x[1]).cos()
        }));
        let tn = SymTensorField::from_fn(grid, |x| {
            let a = weights[2] * s * (PI * x[0] + phase).sin();
            let b = weights[2] * s * (PI * x[1]).cos();
            [[a, 0.5 * b, 0.0], [0.5 * b, -a, 0.2 * a], [0.0, 0.2 * a, b]]
        });
        w.push(wn);
        pi.push(pn);
        psi.push(tn);
    }
    IterTriple::new(dt, w, pi, psi)
}

/// `base + delta * direction`.
pub fn perturb(base: &IterTriple, direction: &IterTriple, delta: f64) -> Result<IterTriple> {
    let mut out = base.clone();
    for n in 0..out.w.len() {
        out.w[n].axpy(delta, &direction.w[n]);
        out.pi[n].axpy(delta, &direction.pi[n]);
        out.psi[n].axpy(delta, &direction.psi[n]);
    }
    IterTriple::new(out.dt, out.w, out.pi, out.psi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub delta: f64,
    /// Output difference `K(base + delta dir) - K(base)`.
    pub output: YDistance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    /// Ratios `d(delta_k) / d(delta_{k+1})` of successive output distances
    /// scaled by the ratio of the perturbation sizes, so that exactly
    /// linear behaviour gives 1.
    pub fn normalized_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|r| {
                let d = r[0].output.total / r[1].output.total;
                d / (r[0].delta / r[1].delta)
            })
            .collect()
    }

    /// Whether every normalized ratio lies within `[1/factor, factor]`.
    pub fn near_linear(&self, factor: f64) -> bool {
        self.normalized_ratios()
            .iter()
            .all(|r| r.is_finite() && *r <= factor && *r >= 1.0 / factor)
    }
}

/// Applies the map to `base` and to `base + delta * direction` for each
/// `delta` and records the output distances.
pub fn continuity_probe(
    base: &IterTriple,
    direction: &IterTriple,
    deltas: &[f64],
    f: &[VectorField],
    params: &FluidParams,
    settings: MapSettings,
) -> Result<ProbeReport> {
    let k0 = picard_map(base, f, params, settings)?.triple;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let k = picard_map(&perturb(base, direction, delta)?, f, params, settings)?.triple;
        rows.push(ProbeRow {
            delta,
            output: k.distance(&k0, params)?,
        });
    }
    Ok(ProbeReport { rows })
}
