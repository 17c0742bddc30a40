//! Pseudospectral simulation and verification tools for Toner-Tu type
//! flocking models linearized around the ordered steady state.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod inequality_lab;
pub mod models;
pub mod spectral;
pub mod timestepper;

pub use error::{Error, Result};
