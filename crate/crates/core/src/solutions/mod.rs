//! Explicit plane-wave solutions: the instantaneous field, the initial data
//! it induces, and the forced Duhamel field with closed-form fast paths.

mod closed_form;
mod forced;
mod instant;
pub mod quadrature;

pub use closed_form::{closed_form_exponential_forced, closed_form_resonant};
pub(crate) use forced::{cexpm1, duhamel_integral_quadrature};
pub use forced::{evaluate_forced, evaluate_forced_traced, BranchPath, ForcedEvaluation, ForcedField};
pub use instant::{evaluate_instant, initial_data, InitialDataField, InstantField};
pub use quadrature::{QuadEstimate, QuadratureSpec};

use crate::model::{Branch, Scenario};

/// Coefficients of `f_i` in `(v_x, v_y, v_z, p)`, indexed `[branch][component]`.
///
/// Shared by the instantaneous and the forced solutions.
pub fn branch_coefficients(s: &Scenario) -> [[f64; 4]; 4] {
    let z = s.gas().impedance();
    let [m1, m2, m3, m4] = *s.modes();
    [
        [m1.k, m1.l, m1.m, -z * m1.wavenorm()],
        [m2.k, m2.l, m2.m, z * m2.wavenorm()],
        [m3.l / m3.k, -1.0, 0.0, 0.0],
        [m4.m / m4.k, 0.0, -1.0, 0.0],
    ]
}

/// `Σ_i coef[i][c]·values[i]` for each component, in branch order.
pub(crate) fn combine(coef: &[[f64; 4]; 4], values: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for b in Branch::ALL {
        let i = b.index();
        if values[i] == 0.0 {
            continue;
        }
        for c in 0..4 {
            if coef[i][c] != 0.0 {
                out[c] += coef[i][c] * values[i];
            }
        }
    }
    out
}
