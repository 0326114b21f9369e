#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use oldroyd_core::fields::{deformation, mean_zero_project, Grid, ScalarField, SymTensorField, VectorField};

pub fn grid(n: usize) -> Arc<Grid> {
    Arc::new(Grid::unit(2, n).unwrap())
}

pub fn vortex(g: &Arc<Grid>, amp: f64) -> VectorField {
    let mut u = VectorField::from_fn(g, |x| {
        let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        [
            amp * sx * sx * (2.0 * PI * x[1]).sin(),
            -amp * (2.0 * PI * x[0]).sin() * sy * sy,
            0.0,
        ]
    });
    u.enforce_dirichlet();
    u
}

pub fn cosine_density(g: &Arc<Grid>, amp: f64) -> ScalarField {
    mean_zero_project(&ScalarField::from_fn(g, |x| {
        amp * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos()
    }))
}

pub fn proportional_stress(u: &VectorField, amp: f64) -> SymTensorField {
    let mut t = deformation(u);
    t.scale(amp);
    t
}
