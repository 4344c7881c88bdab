//! Sup-norm phase spaces: the representation constants, inversion of the
//! initial-data representation, norm estimates and growth rates.

mod constants;
mod growth;
mod inversion;
mod norms;

pub use constants::{big_m_entries, compute_M, compute_delta, compute_m, compute_m_prime, RepresentationConstants};
pub use growth::{
    default_growth_grid, default_growth_schedule, growth_rate_estimate, log_sup_series, GrowthRateResult,
};
pub use inversion::{invert_representation, Inverter};
pub use norms::{sampled_sups, sup_norm_estimate, NormEstimate};
