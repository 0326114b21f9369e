use super::characteristics::{trace, CharacteristicMap};
use crate::error::{Error, Result};
use crate::fields::{divergence, mean, same_grid, Field, ScalarField, VectorField};
use crate::rheology::FluidParams;

/// Relative slack on the density band before a violation is reported.
const BAND_TOL: f64 = 1e-12;
const ROUNDOFF_MEAN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityStepReport {
    /// Mean of the updated field before the mean-zero projection.
    pub mean_pre_projection: f64,
    pub density_min: f64,
    pub density_max: f64,
}

/// One step of `sigma' + (w.grad) sigma + sigma div w = -eps^-2 alpha div w`.
pub fn step_density(
    sigma_prev: &ScalarField,
    w: &VectorField,
    dt: f64,
    params: &FluidParams,
) -> Result<(ScalarField, DensityStepReport)> {
    let map = trace(w, dt)?;
    step_density_on(&map, sigma_prev, w, params)
}

/// Density step along a precomputed characteristic map.
///
/// Along each characteristic the linear ODE `s' = -(s + c) div w`, with
/// `c = eps^-2 alpha` and `div w` frozen at the arrival node, is solved
/// exactly: `s_new = s_dep e^{-dt div w} + c (e^{-dt div w} - 1)`. The
/// result is projected to zero mean and checked against the density band.
pub fn step_density_on(
    map: &CharacteristicMap,
    sigma_prev: &ScalarField,
    w: &VectorField,
    params: &FluidParams,
) -> Result<(ScalarField, DensityStepReport)> {
    same_grid(map.grid(), sigma_prev.grid())?;
    same_grid(map.grid(), w.grid())?;
    let g = sigma_prev.grid().clone();
    let dt = map.dt();
    let c = params.acoustic_coefficient();
    let div = divergence(w);
    let dep = map.advect(sigma_prev.values());
    let values: Vec<f64> = dep
        .iter()
        .zip(div.values())
        .map(|(s, d)| {
            let x = -dt * d;
            s * x.exp() + c * x.exp_m1()
        })
        .collect();
    let mut sigma = ScalarField::from_values(&g, values)?;
    let m = mean(&sigma);
    // drift at round-off level is left alone so that a motionless step is exact
    if m.abs() > ROUNDOFF_MEAN * (1.0 + sigma.max_abs()) {
        for v in sigma.values_mut() {
            *v -= m;
        }
    }
    let (density_min, density_max) = band_check(&sigma, params)?;
    Ok((
        sigma,
        DensityStepReport {
            mean_pre_projection: m,
            density_min,
            density_max,
        },
    ))
}

fn band_check(sigma: &ScalarField, params: &FluidParams) -> Result<(f64, f64)> {
    let (lo, hi) = params.density_band();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (idx, s) in sigma.values().iter().enumerate() {
        let rho = params.density(*s);
        if !(rho >= lo * (1.0 - BAND_TOL) && rho <= hi * (1.0 + BAND_TOL)) {
            return Err(Error::DensityBand {
                node: sigma.grid().coords(idx),
                step: None,
                value: rho,
                lower: lo,
                upper: hi,
            });
        }
        min = min.min(rho);
        max = max.max(rho);
    }
    Ok((min, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{mean_zero_project, Grid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<Grid> {
        Arc::new(Grid::unit(2, n).unwrap())
    }

    #[test]
    fn zero_velocity_leaves_density_unchanged() {
        let g = grid(16);
        let sigma0 = mean_zero_project(&ScalarField::from_fn(&g, |x| {
            (2.0 * PI * x[0]).cos() * (PI * x[1]).sin()
        }));
        let (s, rep) =
            step_density(&sigma0, &VectorField::zeros_dirichlet(&g), 0.01, &FluidParams::default())
                .unwrap();
        assert_eq!(s.values(), sigma0.values());
        assert!(rep.mean_pre_projection.abs() < 1e-15);
    }

    #[test]
    fn uniform_dilation_matches_closed_form() {
        let g = grid(32);
        let params = FluidParams::default();
        // w = k (x - 1/2, y - 1/2) on the central patch, tapered to zero at the walls
        let k = 0.4;
        let taper = |t: f64| {
            let d = (t - 0.5).abs();
            if d <= 0.25 {
                1.0
            } else {
                let s = (0.5 - d) / 0.25;
                s * s * (3.0 - 2.0 * s)
            }
        };
        let mut w = VectorField::from_fn(&g, |x| {
            let m = taper(x[0]) * taper(x[1]);
            [k * (x[0] - 0.5) * m, k * (x[1] - 0.5) * m, 0.0]
        });
        w.enforce_dirichlet();
        let dt = 0.01;
        let map = trace(&w, dt).unwrap();
        let c = params.acoustic_coefficient();
        let dep = map.advect(&vec![0.0; g.len()]);
        let div = divergence(&w);
        for idx in g.interior() {
            let p = g.point(idx);
            if (p[0] - 0.5).abs() < 0.2 && (p[1] - 0.5).abs() < 0.2 {
                assert!((div.values()[idx] - 2.0 * k).abs() < 1e-12);
                let s = dep[idx] * (-dt * 2.0 * k).exp() + c * (-dt * 2.0 * k).exp_m1();
                let exact = -c * (1.0 - (-dt * 2.0 * k).exp());
                assert!((s - exact).abs() < 1e-12 * c);
            }
        }
        // the full step differs only by the mean projection
        let (s, rep) = step_density_on(&map, &ScalarField::zeros(&g), &w, &params).unwrap();
        let idx = g.index([16, 16, 0]);
        let exact = -c * (1.0 - (-dt * 2.0 * k).exp());
        assert!((s.values()[idx] + rep.mean_pre_projection - exact).abs() < 1e-10 * c);
    }

    #[test]
    fn mean_is_projected_out() {
        let g = grid(16);
        let params = FluidParams::default();
        let mut w = VectorField::from_fn(&g, |x| {
            [(PI * x[0]).sin() * (PI * x[1]).sin() * 0.1, 0.0, 0.0]
        });
        w.enforce_dirichlet();
        let (s, rep) = step_density(&ScalarField::zeros(&g), &w, 1e-3, &params).unwrap();
        assert!(mean(&s).abs() <= 1e-12 * (1.0 + s.max_abs()));
        assert!(rep.density_min <= rep.density_max);
    }

    #[test]
    fn band_violation_is_reported() {
        let g = grid(8);
        let params = FluidParams::default();
        let mut sigma = ScalarField::zeros(&g);
        sigma.values_mut()[20] = -0.9 / (params.eps * params.eps);
        sigma = mean_zero_project(&sigma);
        let err = step_density(&sigma, &VectorField::zeros_dirichlet(&g), 0.01, &params)
            .unwrap_err();
        assert!(matches!(err, Error::DensityBand { .. }));
    }
}
