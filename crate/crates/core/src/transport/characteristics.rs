use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Field, Grid, VectorField};

/// Round-off allowance, in cells, for departure points outside the box.
const EXCURSION_TOL: f64 = 1e-9;

/// Departure points of the backward characteristics through every node
/// over one step, stored in index coordinates.
#[derive(Debug, Clone)]
pub struct CharacteristicMap {
    grid: Arc<Grid>,
    dt: f64,
    departure: Vec<[f64; 3]>,
    clipped: Vec<bool>,
}

impl CharacteristicMap {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Departure point of node `idx` in index coordinates.
    pub fn departure(&self, idx: usize) -> [f64; 3] {
        self.departure[idx]
    }

    /// Departure point of node `idx` in physical coordinates.
    pub fn departure_point(&self, idx: usize) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (a, pa) in p.iter_mut().enumerate().take(self.grid.dim()) {
            *pa = self.departure[idx][a] * self.grid.spacing(a);
        }
        p
    }

    pub fn clipped(&self) -> &[bool] {
        &self.clipped
    }

    /// Values of a nodal field at the departure points.
    pub fn advect(&self, values: &[f64]) -> Vec<f64> {
        self.departure
            .iter()
            .map(|xi| self.grid.interpolate(values, *xi))
            .collect()
    }
}

fn sample(w: &VectorField, xi: [f64; 3]) -> [f64; 3] {
    let g = w.grid();
    let mut v = [0.0; 3];
    for (a, va) in v.iter_mut().enumerate().take(g.dim()) {
        *va = g.interpolate(w.component(a), xi);
    }
    v
}

/// Second-order backward trace `x_dep = x - dt w(x - dt/2 w(x))` with
/// multilinear interpolation of `w`.
pub fn trace(w: &VectorField, dt: f64) -> Result<CharacteristicMap> {
    if !w.is_dirichlet() {
        return Err(Error::NotDirichlet("transport velocity".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let g = w.grid().clone();
    let dim = g.dim();
    let h: Vec<f64> = (0..dim).map(|a| g.spacing(a)).collect();
    let mut departure = Vec::with_capacity(g.len());
    let mut clipped = vec![false; g.len()];
    for idx in 0..g.len() {
        let c = g.coords(idx);
        let v0 = w.at(idx);
        let mut mid = [0.0; 3];
        for a in 0..dim {
            mid[a] = c[a] as f64 - 0.5 * dt * v0[a] / h[a];
        }
        let vm = sample(w, mid);
        let mut xi = [0.0; 3];
        for a in 0..dim {
            let x = c[a] as f64 - dt * vm[a] / h[a];
            let n = g.cells(a) as f64;
            let excursion = (-x).max(x - n);
            if excursion > 0.0 {
                if excursion > EXCURSION_TOL {
                    return Err(Error::Departure {
                        node: c,
                        excursion,
                    });
                }
                clipped[idx] = true;
            }
            xi[a] = x.clamp(0.0, n);
        }
        departure.push(xi);
    }
    Ok(CharacteristicMap {
        grid: g,
        dt,
        departure,
        clipped,
    })
}
