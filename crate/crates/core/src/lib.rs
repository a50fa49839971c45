//! Euler-Poincare flows on the automorphism group of a trivial principal
//! bundle `R^n x G`: charged peakons, 1D and 2D spectral solvers for the
//! reduced equations, and Clebsch momentum-map checks.

pub mod clebsch;
pub mod epaut1d;
pub mod epaut2d;
pub mod error;
pub mod integrate;
pub mod kernels;
pub mod lie;
pub mod potential;
pub mod singular;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
