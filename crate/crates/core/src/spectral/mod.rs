//! Periodic-box discretization and spectral calculus.

pub mod fft;
mod field;
mod grid;
mod ops;

pub use field::{Field, Representation, ScalarField, VectorField, HERMITIAN_TOL};
pub use grid::{Grid, Mode};
pub use ops::{
    curl, cutoff, dealias, derivative, divergence, freq_project_high, freq_project_low, gradient,
    heat_evolve, heat_evolve_capped, is_resolved, jacobian_field, laplacian, leray_project,
    DEFAULT_AMPLIFICATION_CAP,
};
