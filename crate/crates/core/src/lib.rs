//! Numerics for orthogonal polynomials on finite-gap and Cantor-type subsets
//! of the real line: equilibrium measures and Green's functions, spectral
//! measures with their tau-transform, Jacobi recurrences, and Widom factors.

pub mod asymptotics;
pub mod error;
pub mod interval_sets;
pub mod jacobi;
pub mod measure;
pub mod potential;
pub mod quadrature;

pub use error::{Error, Result};
