//! Grids, nodal fields, difference operators and discrete norms.

mod field;
mod grid;
pub mod norms;
pub mod ops;
pub mod snapshot;

pub use field::{
    same_grid, Field, ScalarField, SkewTensorField, SymTensorField, TensorField, VectorField,
};
pub use grid::{sym_index, sym_pairs, Grid, MIN_CELLS};
pub use norms::{h_minus1_sq, inner, l2, l2_sq, mean, mean_zero_project, norm, sobolev_sq};
pub use ops::{
    convective, deformation, div_tensor, divergence, gradient, laplacian, op_a, rate_tensors,
    velocity_gradient,
};
pub use snapshot::Snapshot;
