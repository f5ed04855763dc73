//! Simulation and verification lab for exact recovery in correlated
//! Gaussian Wigner matrix alignment.

pub mod cli;
pub mod codec;
pub mod energy;
pub mod error;
pub mod harness;
pub mod model;
pub mod perm;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
