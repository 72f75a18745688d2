//! Computational laboratory for two-interval Angelesco systems.
//!
//! The crate is layered bottom-up:
//!
//! * [`precision`] extended-precision scalars, polynomials, quadrature, dense
//!   solves, root isolation and a machine-precision symmetric eigensolver;
//! * [`mop`] moments, type I/II multiple orthogonal polynomials and the
//!   nearest-neighbour recurrence coefficients;
//! * [`curve`] the genus-zero three-sheeted spectral curve attached to a
//!   limiting ratio `c`, its conformal constants and equilibrium measures;
//! * [`szego`] single-interval Szegő functions and the marginal predictor;
//! * [`tree`] Jacobi operators on the rooted binary tree and their spectra.

pub mod curve;
pub mod error;
pub mod mop;
pub mod precision;
pub mod szego;
pub mod tree;

pub use error::{Error, Result};
