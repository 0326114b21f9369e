//! Backward-Euler integration of the linear velocity problem and the
//! discrete energy estimates it satisfies.

mod estimates;
mod step;

pub use estimates::{check_estimate_4_6, check_estimate_4_7, EstimateReport, EstimateRow};
pub use step::{solve_velocity, step_velocity, DissipationCheck, VelocityStepReport};

use crate::fields::VectorField;

/// Velocity iterates `u[0..=N]` with the forcing used at each level.
#[derive(Debug, Clone)]
pub struct VelocityTrajectory {
    pub dt: f64,
    pub u: Vec<VectorField>,
    pub forcing: Vec<VectorField>,
    pub reports: Vec<VelocityStepReport>,
}

impl VelocityTrajectory {
    pub fn steps(&self) -> usize {
        self.u.len().saturating_sub(1)
    }

    /// Backward difference `(u[n] - u[n-1]) / dt` for `n >= 1`.
    pub fn derivative(&self, n: usize) -> VectorField {
        let mut d = self.u[n].clone();
        d.axpy(-1.0, &self.u[n - 1]);
        d.scale(1.0 / self.dt);
        d
    }
}
