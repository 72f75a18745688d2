//! Moments, type I/II multiple orthogonal polynomials and recurrence
//! coefficients for a two-interval Angelesco system.
//!
//! All polynomials live in the monomial basis and are obtained from
//! moment systems solved at the working precision; every solve reports a
//! relative residual.

mod geometry;
mod nnrr;
mod remainder;
mod system;
mod zeros;

pub use geometry::{Density, Geometry, MultiIndex, WeightKind, WeightSpec};
pub use nnrr::{
    nnrr_entries, nnrr_table, recurrence_residual, recurrence_residual_relative, NnrrEntry, NnrrTable, SolutionSet,
};
pub use remainder::least_squares_slope;
pub use system::{moments, type1_mop, type2_mop, AngelescoSystem, MopSolution};
pub use zeros::{interlace, zeros};

use crate::precision::{to_decimal, Poly};
use serde::Serialize;

#[derive(Serialize)]
struct SolutionRecord {
    n1: usize,
    n2: usize,
    p_monic: Vec<String>,
    a1_poly: Option<Vec<String>>,
    a2_poly: Option<Vec<String>>,
    h1: String,
    h2: String,
    residual: String,
}

impl MopSolution {
    /// JSON with ascending coefficient arrays as decimal strings.
    pub fn to_json(&self, digits: usize) -> String {
        let coeffs = |p: &Poly| p.coeffs().iter().map(|c| to_decimal(c, digits)).collect::<Vec<_>>();
        let rec = SolutionRecord {
            n1: self.index.n1,
            n2: self.index.n2,
            p_monic: coeffs(&self.p_monic),
            a1_poly: self.a1_poly.as_ref().map(coeffs),
            a2_poly: self.a2_poly.as_ref().map(coeffs),
            h1: to_decimal(&self.h1, digits),
            h2: to_decimal(&self.h2, digits),
            residual: to_decimal(&self.residual, 6),
        };
        serde_json::to_string_pretty(&rec).expect("plain record serializes")
    }
}
