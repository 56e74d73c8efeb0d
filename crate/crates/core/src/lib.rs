//! Pseudo-spectral incompressible MHD on a periodic box, with localized
//! Beltrami initial data and a null-point census for detecting magnetic
//! reconnection.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod initial_data;
pub mod io;
pub mod solver;
pub mod spectral;
pub mod topology;

pub use error::{Error, Result};
