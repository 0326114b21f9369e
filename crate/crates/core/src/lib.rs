//! Solver for the nondimensional compressible Oldroyd-B system on a box.
//!
//! The coupled problem is solved by successive substitution through a map
//! that freezes the coefficients at a candidate trajectory `(w, pi, psi)`
//! and solves three linear problems: a parabolic velocity problem, a
//! density transport problem and a stress transport problem. Each solver
//! carries discrete versions of the energy bounds it is expected to obey.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fields;
pub mod fixed_point;
pub mod linalg;
pub mod rheology;
pub mod transport;
pub mod velocity;

pub use error::{Error, Result};
