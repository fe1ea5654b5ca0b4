//! Singular spectra and Schatten norms of integration, multiplication and
//! Toeplitz operators on weighted Dirichlet spaces.

pub mod error;
pub mod special;
pub mod spaces;
pub mod operators;
pub mod hyperbolic;
pub mod spectra;
pub mod norms;
pub mod asymptotics;

pub use error::{LabError, Result};
pub mod cli;
