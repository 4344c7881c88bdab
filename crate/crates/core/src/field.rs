//! Field evaluators and the spatial sample sets they are swept over.

use std::f64::consts::PI;

use crate::error::Result;
use crate::model::{Extended, FieldSample};

/// Anything that yields `(v'_x, v'_y, v'_z, p')` at a space-time point.
pub trait FieldEvaluator: Sync {
    fn eval(&self, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample>;

    /// `ln|·|` of each component. Implementors with exponentially large
    /// fields override this to avoid overflow.
    fn ln_abs(&self, x: f64, y: f64, z: f64, t: f64) -> Result<[f64; 4]> {
        Ok(self.eval(x, y, z, t)?.components().map(|v| v.abs().ln()))
    }

    /// Upper bound on `sup_{ℝ³}` of every component at time `t`.
    fn sup_bound(&self, _t: f64) -> Extended {
        Extended::PosInf
    }
}

impl<E: FieldEvaluator + ?Sized> FieldEvaluator for &E {
    fn eval(&self, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample> {
        (**self).eval(x, y, z, t)
    }

    fn ln_abs(&self, x: f64, y: f64, z: f64, t: f64) -> Result<[f64; 4]> {
        (**self).ln_abs(x, y, z, t)
    }

    fn sup_bound(&self, t: f64) -> Extended {
        (**self).sup_bound(t)
    }
}

/// Closure-backed evaluator with an optional known sup bound.
pub struct FnField<F> {
    f: F,
    bound: Extended,
}

impl<F> FnField<F>
where
    F: Fn(f64, f64, f64, f64) -> [f64; 4] + Sync,
{
    pub fn new(f: F) -> Self {
        FnField { f, bound: Extended::PosInf }
    }

    pub fn with_bound(mut self, bound: Extended) -> Self {
        self.bound = bound;
        self
    }
}

impl<F> FieldEvaluator for FnField<F>
where
    F: Fn(f64, f64, f64, f64) -> [f64; 4] + Sync,
{
    fn eval(&self, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample> {
        Ok(FieldSample::zero_at(x, y, z, t).with_components((self.f)(x, y, z, t)))
    }

    fn sup_bound(&self, _t: f64) -> Extended {
        self.bound
    }
}

/// A finite set of sample points in ℝ³.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpatialGrid {
    points: Vec<[f64; 3]>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

impl SpatialGrid {
    /// Tensor grid with `n[d]` points per axis over `[lo, hi]` (a single
    /// point on an axis sits at the midpoint).
    pub fn cube(n: [usize; 3], lo: f64, hi: f64) -> Self {
        let mut points = Vec::with_capacity(n[0] * n[1] * n[2]);
        for x in linspace(lo, hi, n[0]) {
            for y in linspace(lo, hi, n[1]) {
                for z in linspace(lo, hi, n[2]) {
                    points.push([x, y, z]);
                }
            }
        }
        SpatialGrid { points }
    }

    /// 21³ points over `[−2π, 2π]³`.
    pub fn standard() -> Self {
        SpatialGrid::cube([21, 21, 21], -2.0 * PI, 2.0 * PI)
    }

    /// `n` equally spaced points on the segment `from → to`.
    pub fn line(from: [f64; 3], to: [f64; 3], n: usize) -> Self {
        let points = (0..n)
            .map(|i| {
                let s = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                [0, 1, 2].map(|d| from[d] + s * (to[d] - from[d]))
            })
            .collect();
        SpatialGrid { points }
    }

    pub fn from_points(points: Vec<[f64; 3]>) -> Self {
        SpatialGrid { points }
    }

    pub fn union(mut self, other: SpatialGrid) -> Self {
        self.points.extend(other.points);
        self
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
