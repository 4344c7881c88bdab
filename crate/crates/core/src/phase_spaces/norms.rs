use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldEvaluator, SpatialGrid};
use crate::model::Extended;

/// Two-sided estimate of a sup norm over ℝ³.
///
/// `lower` is a sampled maximum, `upper` an analytic bound, so hypotheses are
/// checked against `upper` and conclusions against `lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: Extended,
    /// Sampled sup of each of the four components.
    pub components: [f64; 4],
}

impl NormEstimate {
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper.to_f64()
    }
}

/// Sampled sups of `|v_x|, |v_y|, |v_z|, |p|` over `grid` at time `t`.
pub fn sampled_sups<E: FieldEvaluator + ?Sized>(field: &E, grid: &SpatialGrid, t: f64) -> Result<[f64; 4]> {
    grid.points()
        .par_iter()
        .map(|&[x, y, z]| field.eval(x, y, z, t).map(|s| s.components().map(f64::abs)))
        .try_reduce(|| [0.0; 4], |a, b| Ok([0, 1, 2, 3].map(|i| a[i].max(b[i]))))
}

/// Max-of-four-sups norm of `field` at time `t`.
pub fn sup_norm_estimate<E: FieldEvaluator + ?Sized>(field: &E, grid: &SpatialGrid, t: f64) -> Result<NormEstimate> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sample grid is empty".into()));
    }
    let components = sampled_sups(field, grid, t)?;
    let lower = components.iter().fold(0.0_f64, |m, v| m.max(*v));
    Ok(NormEstimate { lower, upper: field.sup_bound(t), components })
}
