//! Semi-Lagrangian transport of the density remainder and the extra stress
//! along backward characteristics of a frozen velocity.

mod bounds;
mod characteristics;
mod density;
mod stress;

pub use bounds::{
    density_bounds, density_bounds_running, stress_bounds, stress_bounds_running, TransportBounds,
};
pub use characteristics::{trace, CharacteristicMap};
pub use density::{step_density, step_density_on, DensityStepReport};
pub use stress::{g_matrix, local_update, step_stress, step_stress_on, StressScheme};
