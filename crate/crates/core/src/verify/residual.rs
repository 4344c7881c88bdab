use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldEvaluator, SpatialGrid};
use crate::model::{GasParameters, Scenario};

pub const EQUATIONS: [&str; 4] = ["momentum_x", "momentum_y", "momentum_z", "pressure"];

/// Residuals below this multiple of their rounding level carry no order
/// information.
pub const NOISE_MARGIN: f64 = 100.0;

/// Per-equation residual, largest term and rounding level at one point.
type PointTerms = ([f64; 4], [f64; 4], [f64; 4]);

/// Finite-difference residual of the linearized equations over a grid.
///
/// `scaled[e]` is `residuals[e]` divided by the largest magnitude of any
/// single term of equation `e` over the grid, each partial derivative of the
/// divergence counting as its own term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub t: f64,
    /// Spatial step.
    pub h: f64,
    /// Time step `h / (|U0| + c0)`.
    pub tau: f64,
    pub points: usize,
    pub residuals: [f64; 4],
    pub scales: [f64; 4],
    pub scaled: [f64; 4],
    /// Rounding-error level of each residual, from the magnitudes differenced.
    pub noise: [f64; 4],
    pub max_scaled: f64,
    /// `max_scaled` rerun with `h/2`, when a convergence run was requested.
    pub half_step_max_scaled: Option<f64>,
    /// `log2` of the ratio between the two runs, over the equations whose
    /// residual stays above [`NOISE_MARGIN`] times its rounding level.
    pub order: Option<f64>,
}

/// Source `h(t)·A(x)·sin ω_f t` of the forced equations.
#[derive(Clone, Copy)]
pub struct Forcing<'a> {
    pub amplitude: &'a dyn FieldEvaluator,
    pub omega_f: f64,
}

/// Time step paired with the spatial step `h`.
pub fn time_step(gas: &GasParameters, h: f64) -> f64 {
    h / (gas.u0().abs() + gas.c0())
}

fn point_terms<E: FieldEvaluator + ?Sized>(
    field: &E,
    gas: &GasParameters,
    p: [f64; 3],
    t: f64,
    h: f64,
    tau: f64,
    forcing: Option<Forcing<'_>>,
) -> Result<PointTerms> {
    let [x, y, z] = p;
    let at = |dx: f64, dy: f64, dz: f64, dt: f64| -> Result<[f64; 4]> {
        Ok(field.eval(x + dx, y + dy, z + dz, t + dt)?.components())
    };
    // Central difference and its rounding level.
    let diff = |a: [f64; 4], b: [f64; 4], step: f64| {
        (
            [0, 1, 2, 3].map(|i| (a[i] - b[i]) / (2.0 * step)),
            [0, 1, 2, 3].map(|i| f64::EPSILON * (a[i].abs() + b[i].abs()) / (2.0 * step)),
        )
    };
    let (dt, nt) = diff(at(0.0, 0.0, 0.0, tau)?, at(0.0, 0.0, 0.0, -tau)?, tau);
    let (dx, nx) = diff(at(h, 0.0, 0.0, 0.0)?, at(-h, 0.0, 0.0, 0.0)?, h);
    let (dy, ny) = diff(at(0.0, h, 0.0, 0.0)?, at(0.0, -h, 0.0, 0.0)?, h);
    let (dz, nz) = diff(at(0.0, 0.0, h, 0.0)?, at(0.0, 0.0, -h, 0.0)?, h);
    let (grad, ngrad) = ([dx, dy, dz], [nx, ny, nz]);

    let (u0, rho0, c0) = (gas.u0(), gas.rho0(), gas.c0());
    let source = match forcing {
        Some(f) if t > 0.0 => {
            let a = f.amplitude.eval(x, y, z, 0.0)?.components();
            let s = (f.omega_f * t).sin();
            a.map(|v| v * s)
        }
        _ => [0.0; 4],
    };
    let mut residual = [0.0; 4];
    let mut scale = [0.0; 4];
    let mut noise = [0.0; 4];
    for d in 0..3 {
        let terms = [dt[d], u0 * dx[d], grad[d][3] / rho0, -source[d]];
        residual[d] = terms.iter().sum::<f64>().abs();
        scale[d] = terms.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        noise[d] = nt[d] + u0.abs() * nx[d] + ngrad[d][3] / rho0 + f64::EPSILON * scale[d];
    }
    let k = rho0 * c0 * c0;
    let terms = [dt[3], u0 * dx[3], k * dx[0], k * dy[1], k * dz[2], -source[3]];
    residual[3] = terms.iter().sum::<f64>().abs();
    scale[3] = terms.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    noise[3] = nt[3] + u0.abs() * nx[3] + k * (nx[0] + ny[1] + nz[2]) + f64::EPSILON * scale[3];
    Ok((residual, scale, noise))
}

/// Central-difference residual of the four equations at every grid point.
pub fn pde_residual<E: FieldEvaluator + ?Sized>(
    field: &E,
    gas: &GasParameters,
    grid: &SpatialGrid,
    t: f64,
    h: f64,
    forcing: Option<Forcing<'_>>,
) -> Result<ResidualReport> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive (got {h})")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("residual grid is empty".into()));
    }
    let tau = time_step(gas, h);
    if forcing.is_some() && t < 2.0 * tau {
        return Err(Error::Precondition(format!("forced residual needs t >= 2·tau = {} (got {t})", 2.0 * tau)));
    }
    let max4 = |a: [f64; 4], b: [f64; 4]| [0, 1, 2, 3].map(|i| a[i].max(b[i]));
    let (residuals, scales, noise) = grid
        .points()
        .par_iter()
        .map(|p| point_terms(field, gas, *p, t, h, tau, forcing))
        .try_reduce(|| ([0.0; 4], [0.0; 4], [0.0; 4]), |a, b| Ok((max4(a.0, b.0), max4(a.1, b.1), max4(a.2, b.2))))?;
    let scaled = [0, 1, 2, 3].map(|i| if scales[i] > 0.0 { residuals[i] / scales[i] } else { 0.0 });
    let max_scaled = scaled.iter().fold(0.0_f64, |m, v| m.max(*v));
    Ok(ResidualReport {
        t,
        h,
        tau,
        points: grid.len(),
        residuals,
        scales,
        scaled,
        noise,
        max_scaled,
        half_step_max_scaled: None,
        order: None,
    })
}

/// [`pde_residual`] at `h` and `h/2`, with the observed order.
pub fn pde_residual_convergence<E: FieldEvaluator + ?Sized>(
    field: &E,
    gas: &GasParameters,
    grid: &SpatialGrid,
    t: f64,
    h: f64,
    forcing: Option<Forcing<'_>>,
) -> Result<ResidualReport> {
    let mut coarse = pde_residual(field, gas, grid, t, h, forcing)?;
    let fine = pde_residual(field, gas, grid, t, 0.5 * h, forcing)?;
    coarse.half_step_max_scaled = Some(fine.max_scaled);
    let resolved: Vec<usize> = (0..4).filter(|&e| coarse.residuals[e] > NOISE_MARGIN * coarse.noise[e]).collect();
    let worst = |r: &ResidualReport| resolved.iter().fold(0.0_f64, |m, &e| m.max(r.scaled[e]));
    let (c, f) = (worst(&coarse), worst(&fine));
    if c > 0.0 && f > 0.0 {
        coarse.order = Some((c / f).log2());
    }
    Ok(coarse)
}

/// Points of `grid` whose stencils at step `h` stay clear of every profile
/// breakpoint, for the instantaneous or (with `forced`) the Duhamel field.
pub fn smooth_points(s: &Scenario, grid: &SpatialGrid, t: f64, h: f64, forced: bool) -> SpatialGrid {
    let tau = time_step(s.gas(), h);
    let speeds = s.characteristic_speeds();
    let kept = grid
        .points()
        .iter()
        .copied()
        .filter(|&[x, y, z]| {
            s.active_branches().all(|b| {
                let breaks = s.profile(b).breakpoints();
                if breaks.is_empty() {
                    return true;
                }
                let mode = s.mode(b);
                let c = speeds[b.index()];
                let margin = 2.0 * (h * (mode.k.abs() + mode.l.abs() + mode.m.abs()) + c.abs() * tau);
                let xi0 = mode.phase(x, y, z);
                let (lo, hi) = if forced {
                    let end = xi0 - c * t;
                    (xi0.min(end), xi0.max(end))
                } else {
                    (xi0 - c * t, xi0 - c * t)
                };
                breaks.iter().all(|bp| *bp < lo - margin || *bp > hi + margin)
            })
        })
        .collect();
    SpatialGrid::from_points(kept)
}
