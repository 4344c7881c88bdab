use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldEvaluator, SpatialGrid};
use crate::model::{Branch, Extended, Scenario};

/// Slopes must grow by more than this factor between consecutive windows to
/// count as super-exponential growth.
const DIVERGENCE_RATIO: f64 = 1.1;
/// Smallest first-window slope considered for divergence.
const DIVERGENCE_FLOOR: f64 = 1e-6;
const LINE_SPACING: f64 = 0.1;
const MAX_LINE_POINTS: usize = 400_001;

/// Estimated exponential growth rate of a field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRateResult {
    pub nu: Extended,
    /// Fitted slopes of the dominant component, smallest window first.
    pub window_slopes: Vec<f64>,
    pub diverged: bool,
    /// Rate of `v_x, v_y, v_z, p` separately.
    pub component_rates: [Extended; 4],
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let tm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let sm = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, s) in points {
        num += (t - tm) * (s - sm);
        den += (t - tm) * (t - tm);
    }
    num / den
}

/// Window lengths, all starting at the first point of the trailing half.
fn window_lengths(n: usize) -> (usize, [usize; 3]) {
    let h = n - n / 2;
    let len = |k: usize| (h * k).div_ceil(3).max(2).min(h);
    (n - h, [len(1), len(2), h])
}

/// `ln sup_grid |component|` at each scheduled time.
pub fn log_sup_series<E: FieldEvaluator + ?Sized>(
    field: &E,
    grid: &SpatialGrid,
    t_schedule: &[f64],
) -> Result<Vec<[f64; 4]>> {
    t_schedule
        .iter()
        .map(|&t| {
            grid.points()
                .par_iter()
                .map(|&[x, y, z]| field.ln_abs(x, y, z, t))
                .try_reduce(|| [f64::NEG_INFINITY; 4], |a, b| Ok([0, 1, 2, 3].map(|i| a[i].max(b[i]))))
        })
        .collect()
}

/// Fits `ln sup|·|` against `t` over nested windows of the trailing half of
/// `t_schedule` and reports the largest last-window slope.
pub fn growth_rate_estimate<E: FieldEvaluator + ?Sized>(
    field: &E,
    grid: &SpatialGrid,
    t_schedule: &[f64],
) -> Result<GrowthRateResult> {
    if t_schedule.len() < 8 {
        return Err(Error::InvalidParameter("t_schedule needs at least 8 points".into()));
    }
    if t_schedule.iter().any(|t| !t.is_finite()) || t_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("t_schedule must be finite and strictly increasing".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sample grid is empty".into()));
    }
    let series = log_sup_series(field, grid, t_schedule)?;
    let (start, lengths) = window_lengths(t_schedule.len());

    let mut rates = [Extended::NegInf; 4];
    let mut slopes: [Vec<f64>; 4] = Default::default();
    let mut diverged = [false; 4];
    for c in 0..4 {
        let tail: Vec<(f64, f64)> = (start..t_schedule.len()).map(|j| (t_schedule[j], series[j][c])).collect();
        if tail.iter().any(|p| p.1 == f64::INFINITY) {
            diverged[c] = true;
            rates[c] = Extended::PosInf;
            continue;
        }
        if tail.iter().all(|p| p.1 == f64::NEG_INFINITY) {
            continue;
        }
        slopes[c] = lengths
            .iter()
            .map(|&len| {
                let pts: Vec<(f64, f64)> = tail[..len].iter().copied().filter(|p| p.1.is_finite()).collect();
                if pts.len() < 2 {
                    f64::NEG_INFINITY
                } else {
                    ls_slope(&pts)
                }
            })
            .collect();
        let s = &slopes[c];
        diverged[c] = s[0] > DIVERGENCE_FLOOR && s.windows(2).all(|w| w[1] > DIVERGENCE_RATIO * w[0]);
        rates[c] = if diverged[c] { Extended::PosInf } else { Extended::from_f64(s[s.len() - 1]) };
    }

    let dominant = (0..4).fold(0, |best, c| if rates[c].to_f64() > rates[best].to_f64() { c } else { best });
    Ok(GrowthRateResult {
        nu: rates[dominant],
        window_slopes: slopes[dominant].clone(),
        diverged: diverged.iter().any(|d| *d),
        component_rates: rates,
    })
}

/// Geometric schedule of `n` times from `t_max/100` to `t_max`.
pub fn default_growth_schedule(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) || n < 8 {
        return Err(Error::InvalidParameter(format!(
            "growth schedule needs t_max > 0 and >= 8 points (got {t_max}, {n})"
        )));
    }
    let t0 = t_max / 100.0;
    let r = (t_max / t0).powf(1.0 / (n - 1) as f64);
    Ok((0..n).map(|j| if j + 1 == n { t_max } else { t0 * r.powi(j as i32) }).collect())
}

/// The standard 21³ cube plus a line along the x-axis that follows every
/// compactly supported branch for `t ∈ [0, t_max]`, so those profiles stay
/// resolved after they leave the cube.
pub fn default_growth_grid(s: &Scenario, t_max: f64) -> SpatialGrid {
    let speeds = s.characteristic_speeds();
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    let mut any = false;
    for b in s.active_branches() {
        let k = s.mode(b).k;
        if k != 0.0 && s.profile(b).support().is_compact() {
            any = true;
            let drift = speeds[b.index()] / k * t_max;
            lo = lo.min(drift);
            hi = hi.max(drift);
        }
    }
    if !any {
        return SpatialGrid::standard();
    }
    let (lo, hi) = (lo - 2.0 * PI, hi + 2.0 * PI);
    let kmax = Branch::ALL.iter().map(|b| s.mode(*b).k.abs()).fold(1.0_f64, f64::max);
    let n = (((hi - lo) * kmax / LINE_SPACING).ceil() as usize + 1).min(MAX_LINE_POINTS);
    SpatialGrid::standard().union(SpatialGrid::line([lo, 0.0, 0.0], [hi, 0.0, 0.0], n))
}
