mod common;

use std::f64::consts::PI;

use common::grid;
use oldroyd_core::fields::{l2, mean, mean_zero_project, ScalarField, SymTensorField, VectorField};
use oldroyd_core::linalg::CgSettings;
use oldroyd_core::rheology::FluidParams;
use oldroyd_core::transport::{step_density, step_stress, StressScheme};
use oldroyd_core::velocity::step_velocity;
use proptest::prelude::*;

fn velocity(amp: f64, kx: f64, ky: f64) -> impl Fn([f64; 3]) -> [f64; 3] {
    move |x| {
        let s = (PI * x[0]).sin() * (PI * x[1]).sin();
        [amp * s * (kx * x[1]).cos(), amp * s * (ky * x[0]).sin(), 0.0]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn stress_step_output_is_symmetric(amp in -2.0f64..2.0, kx in 0.0f64..6.0, ky in 0.0f64..6.0,
                                       a in -1.0f64..1.0, c in -1.0f64..1.0) {
        let g = grid(10);
        let mut w = VectorField::from_fn(&g, velocity(amp, kx, ky));
        w.enforce_dirichlet();
        let tau = SymTensorField::from_fn(&g, |x| [[c, x[0], 0.0], [x[1], 1.0, 0.0], [0.0; 3]]);
        let params = FluidParams { a, ..FluidParams::default() };
        for scheme in [StressScheme::Exponential, StressScheme::BackwardEuler] {
            let out = step_stress(&tau, &w, 5e-3, &params, scheme).unwrap();
            for idx in 0..g.len() {
                let f = out.full(idx);
                prop_assert_eq!(f[0][1], f[1][0]);
                prop_assert!(f[0][0].is_finite());
            }
        }
    }

    #[test]
    fn density_step_keeps_zero_mean(amp in -0.5f64..0.5, kx in 0.0f64..6.0, ky in 0.0f64..6.0, s in -1.0f64..1.0) {
        let g = grid(12);
        let mut w = VectorField::from_fn(&g, velocity(amp, kx, ky));
        w.enforce_dirichlet();
        let sigma = mean_zero_project(&ScalarField::from_fn(&g, |x| s * (2.0 * PI * x[0]).cos() + x[1]));
        let (out, _) = step_density(&sigma, &w, 1e-3, &FluidParams::default()).unwrap();
        prop_assert!(mean(&out).abs() <= 1e-12 * (1.0 + out.max_abs()));
    }

    #[test]
    fn velocity_step_is_linear(a1 in -1.0f64..1.0, a2 in -1.0f64..1.0, c in -3.0f64..3.0) {
        let g = grid(10);
        let params = FluidParams::default();
        let cg = CgSettings { tol: 1e-13, max_iter: 10_000 };
        let mut u1 = VectorField::from_fn(&g, velocity(a1, 1.0, 2.0));
        u1.enforce_dirichlet();
        let mut u2 = VectorField::from_fn(&g, velocity(a2, 3.0, 0.5));
        u2.enforce_dirichlet();
        let f1 = VectorField::from_fn(&g, |x| [x[0], x[1] * x[1], 0.0]);
        let f2 = VectorField::from_fn(&g, |x| [(3.0 * x[1]).sin(), 1.0, 0.0]);
        let (r1, _) = step_velocity(&u1, &f1, 1e-3, &params, cg).unwrap();
        let (r2, _) = step_velocity(&u2, &f2, 1e-3, &params, cg).unwrap();
        let mut us = u1.clone();
        us.axpy(c, &u2);
        let mut fs = f1.clone();
        fs.axpy(c, &f2);
        let (rs, rep) = step_velocity(&us, &fs, 1e-3, &params, cg).unwrap();
        prop_assert!(rep.dissipation.holds());
        let mut d = rs.clone();
        d.axpy(-1.0, &r1);
        d.axpy(-c, &r2);
        prop_assert!(l2(&d) <= 1e-9 * (1.0 + l2(&rs)));
    }
}

#[test]
fn motionless_transport_is_exact() {
    let g = grid(16);
    let params = FluidParams::default();
    let w = VectorField::zeros_dirichlet(&g);
    let sigma0 = common::cosine_density(&g, 0.3);
    let mut sigma = sigma0.clone();
    for _ in 0..50 {
        sigma = step_density(&sigma, &w, 1e-2, &params).unwrap().0;
        assert!(mean(&sigma).abs() <= 1e-12);
    }
    assert_eq!(sigma.values(), sigma0.values());
}

#[test]
fn divergence_free_advection_stays_bounded() {
    // a Gaussian bump carried by a stream-function velocity: the mean and
    // the maximum change only by interpolation error
    let g = grid(48);
    let params = FluidParams::default();
    let mut w = VectorField::from_fn(&g, |x| {
        let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        [sx * sx * (2.0 * PI * x[1]).sin() * 0.2, -(2.0 * PI * x[0]).sin() * sy * sy * 0.2, 0.0]
    });
    w.enforce_dirichlet();
    let bump = mean_zero_project(&ScalarField::from_fn(&g, |x| {
        (-((x[0] - 0.4).powi(2) + (x[1] - 0.5).powi(2)) / 0.01).exp()
    }));
    let max0 = bump.max_abs();
    let mut s = bump.clone();
    let mut drift = 0.0f64;
    for _ in 0..20 {
        let (next, rep) = step_density(&s, &w, 1e-2, &params).unwrap();
        drift = drift.max(rep.mean_pre_projection.abs());
        s = next;
    }
    assert!(s.max_abs() <= max0 * 1.05);
    assert!(drift < 1e-2 * max0, "{drift}");
}
