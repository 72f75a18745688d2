//! The three-sheeted genus-zero surface attached to a mass split `c`.
//!
//! Everything is parametrised by the rational inverse
//! `R(w) = w + A1/(w − B1) + A2/(w − B2)` of the sheet map: its four
//! critical values are the branch points, its monotone real pieces label
//! the sheets, and the constants `A_i`, `B_i` are the limits of the
//! recurrence coefficients along rays of slope `c`.

mod equilibrium;
mod inverse;
mod newton;
mod oracle;
mod sheets;
mod solve;

pub use equilibrium::{equilibrium, EquilibriumData};
pub(crate) use equilibrium::edge_integral;
pub use inverse::InverseMap;
pub use oracle::{dc_oracle, discriminant_cubic, discriminant_roots, energy_oracle, DiscriminantRoot, EnergyEstimate};
pub use sheets::{chi_eval, chi_real, h_boundary, h_branch, upsilon, Side};
pub use solve::{chi_solve, critical_thresholds, curve, default_seed, mass_for_zero, ChiSolution};

use crate::mop::Geometry;
use crate::precision::{to_decimal, XReal};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `c < c*`: the first support shrinks to `[α1, β_{c,1}]`.
    PushedLeft,
    /// `c* ≤ c ≤ c**`: both supports are the full intervals.
    Middle,
    /// `c > c**`: the second support shrinks to `[α_{c,2}, β2]`.
    PushedRight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds {
    pub c_star: XReal,
    pub c_dstar: XReal,
}

/// Solved constants at one value of `c`.
#[derive(Clone, Debug)]
pub struct CurveData {
    pub geometry: Geometry,
    pub c: XReal,
    pub regime: Regime,
    pub beta_c1: XReal,
    pub alpha_c2: XReal,
    pub a1: XReal,
    pub a2: XReal,
    pub b1: XReal,
    pub b2: XReal,
    /// Critical points of the inverse map, ascending.
    pub w_crit: [XReal; 4],
    /// Preimage of `z_c` on sheet 0.
    pub w_star: XReal,
    pub z_c: XReal,
    /// Discriminant parameter; only set in the pushed-left regime.
    pub d_c: Option<XReal>,
    /// `1 − c + c²`.
    pub k: XReal,
    pub solve_residual: XReal,
    pub thresholds: Thresholds,
    /// At `c = 0` (resp. `1`) sheet 1 (resp. 2) degenerates to the point `B_1`
    /// (resp. `B_2`).
    pub collapsed_sheet: Option<usize>,
}

#[derive(Serialize)]
struct ConstantsRecord {
    c: String,
    geometry: [String; 4],
    regime: Regime,
    c_star: String,
    c_dstar: String,
    beta_c1: String,
    alpha_c2: String,
    #[serde(rename = "A1")]
    a1: String,
    #[serde(rename = "A2")]
    a2: String,
    #[serde(rename = "B1")]
    b1: String,
    #[serde(rename = "B2")]
    b2: String,
    z_c: String,
    residual: String,
}

impl CurveData {
    pub fn inverse_map(&self) -> InverseMap {
        InverseMap::new(self.a1.clone(), self.a2.clone(), self.b1.clone(), self.b2.clone())
    }

    /// Constants record with decimal-string numbers.
    pub fn to_json(&self, digits: usize) -> String {
        let d = |x: &XReal| to_decimal(x, digits);
        let rec = ConstantsRecord {
            c: d(&self.c),
            geometry: self.geometry.points().map(d),
            regime: self.regime,
            c_star: d(&self.thresholds.c_star),
            c_dstar: d(&self.thresholds.c_dstar),
            beta_c1: d(&self.beta_c1),
            alpha_c2: d(&self.alpha_c2),
            a1: d(&self.a1),
            a2: d(&self.a2),
            b1: d(&self.b1),
            b2: d(&self.b2),
            z_c: d(&self.z_c),
            residual: to_decimal(&self.solve_residual, 6),
        };
        serde_json::to_string_pretty(&rec).expect("plain record serializes")
    }
}
