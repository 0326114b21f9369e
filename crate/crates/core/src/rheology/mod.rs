//! Constitutive ingredients: parameters and equations of state, the
//! objective-derivative coupling term and the momentum source term.

mod constitutive;
mod params;

pub use constitutive::{check_density_band, g_local, g_term, pressure_w, source_f, Mat3};
pub use params::{FluidParams, PressureLaw, SoundSpeedTable};
