//! Weierstrass-type states of the infinite square well and box-counting
//! dimension estimators for the graphs of their probability densities.

pub mod calibration;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod fractal_dim;
pub mod phase;
pub mod quadrature;
pub mod quantum_state;

pub use error::{Error, Result};
pub use phase::Angle;
