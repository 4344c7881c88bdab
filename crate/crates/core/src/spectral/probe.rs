use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::propagator::{propagator_matrix, Wave};
use crate::error::{Error, Result};
use crate::model::GasParameters;

const UNIT_TOL: f64 = 1e-9;
/// Largest tolerated difference between small-radius limits of different rays.
pub const LIMIT_MISMATCH_TOL: f64 = 1e-6;
/// Relative step of the finite-difference gradient in `α`.
const GRADIENT_STEP: f64 = 1e-5;

fn check_unit(direction: [f64; 3]) -> Result<()> {
    let n = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!("direction {direction:?} is not a unit vector (norm {n})")));
    }
    Ok(())
}

/// Radii along a ray where a forcing denominator vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceLocus {
    pub omega_f: f64,
    pub direction: [f64; 3],
    /// `(family, r)` with `r > 0`.
    pub roots: Vec<(Wave, f64)>,
    /// Families whose denominator is zero on the whole ray.
    pub whole_ray: Vec<Wave>,
}

/// Solves `ω_f + r(d₁U0 − c0) = 0`, `ω_f + r(d₁U0 + c0) = 0` and
/// `ω_f + r d₁U0 = 0` for `r > 0` along `α = r·direction`.
pub fn resonance_locus(gas: &GasParameters, omega_f: f64, direction: [f64; 3]) -> Result<ResonanceLocus> {
    check_unit(direction)?;
    if !omega_f.is_finite() {
        return Err(Error::InvalidParameter(format!("omega_f must be finite (got {omega_f})")));
    }
    let adv = direction[0] * gas.u0();
    let mut roots = Vec::new();
    let mut whole_ray = Vec::new();
    for wave in [Wave::AcousticMinus, Wave::AcousticPlus, Wave::Advective] {
        let slope = match wave {
            Wave::Advective => adv,
            Wave::AcousticMinus => adv - gas.c0(),
            Wave::AcousticPlus => adv + gas.c0(),
        };
        if slope == 0.0 {
            if omega_f == 0.0 {
                whole_ray.push(wave);
            }
            continue;
        }
        let r = -omega_f / slope;
        if r > 0.0 {
            roots.push((wave, r));
        }
    }
    Ok(ResonanceLocus { omega_f, direction, roots, whole_ray })
}

/// One propagator entry sampled along one ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierSeries {
    /// `4·row + col`.
    pub index: usize,
    pub row: usize,
    pub col: usize,
    pub magnitude: Vec<f64>,
    /// Norm of the finite-difference gradient with respect to `α`.
    pub gradient: Vec<f64>,
    /// Value at the smallest sampled radius.
    pub limit: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayProbe {
    pub direction: [f64; 3],
    pub radii: Vec<f64>,
    pub multipliers: Vec<MultiplierSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierProbeReport {
    pub t: f64,
    /// `1 + c0ρ0 + 1/(c0ρ0)`.
    pub reference_bound: f64,
    pub max_magnitude: f64,
    pub rays: Vec<RayProbe>,
    /// Entries whose small-radius limits differ between rays.
    pub limit_mismatch: Vec<usize>,
    /// Entries whose magnitude exceeds the reference bound or keeps growing
    /// over the largest radii.
    pub unbounded_trend: Vec<usize>,
}

fn entries_at(alpha: [f64; 3], gas: &GasParameters, t: f64) -> Result<[[Complex64; 4]; 4]> {
    Ok(propagator_matrix(alpha, gas, t)?.entries)
}

fn probe_ray(gas: &GasParameters, t: f64, direction: [f64; 3], radii: &[f64]) -> Result<RayProbe> {
    let mut mags: Vec<Vec<f64>> = (0..16).map(|_| Vec::with_capacity(radii.len())).collect();
    let mut grads: Vec<Vec<f64>> = (0..16).map(|_| Vec::with_capacity(radii.len())).collect();
    let mut limit = [Complex64::new(0.0, 0.0); 16];
    let smallest = radii.iter().enumerate().fold(0, |best, (i, r)| if *r < radii[best] { i } else { best });
    for (ri, &r) in radii.iter().enumerate() {
        let alpha = direction.map(|d| d * r);
        let centre = entries_at(alpha, gas, t)?;
        let h = GRADIENT_STEP * r;
        let mut partials = [[0.0_f64; 3]; 16];
        for axis in 0..3 {
            let mut up = alpha;
            let mut down = alpha;
            up[axis] += h;
            down[axis] -= h;
            let eu = entries_at(up, gas, t)?;
            let ed = entries_at(down, gas, t)?;
            for (idx, p) in partials.iter_mut().enumerate() {
                let (i, j) = (idx / 4, idx % 4);
                p[axis] = ((eu[i][j] - ed[i][j]) / (2.0 * h)).norm();
            }
        }
        for idx in 0..16 {
            let (i, j) = (idx / 4, idx % 4);
            mags[idx].push(centre[i][j].norm());
            grads[idx].push(partials[idx].iter().map(|g| g * g).sum::<f64>().sqrt());
            if ri == smallest {
                limit[idx] = centre[i][j];
            }
        }
    }
    let multipliers = (0..16)
        .map(|idx| MultiplierSeries {
            index: idx,
            row: idx / 4,
            col: idx % 4,
            magnitude: std::mem::take(&mut mags[idx]),
            gradient: std::mem::take(&mut grads[idx]),
            limit: limit[idx],
        })
        .collect();
    Ok(RayProbe { direction, radii: radii.to_vec(), multipliers })
}

/// Peak magnitude over the largest third of the radii exceeds the peak over
/// the middle third by more than a decade.
fn grows_at_large_radii(radii: &[f64], mags: &[f64]) -> bool {
    if radii.len() < 6 {
        return false;
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|a, b| radii[*a].total_cmp(&radii[*b]));
    let third = radii.len() / 3;
    let peak = |ix: &[usize]| ix.iter().map(|i| mags[*i]).fold(0.0_f64, f64::max);
    let top = peak(&order[radii.len() - third..]);
    let mid = peak(&order[radii.len() - 2 * third..radii.len() - third]);
    top > 10.0 * mid && top > 1e-12
}

/// Samples every propagator entry along `rays` at `radii`.
pub fn multiplier_probe(
    gas: &GasParameters,
    t: f64,
    rays: &[[f64; 3]],
    radii: &[f64],
) -> Result<MultiplierProbeReport> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite (got {t})")));
    }
    if rays.is_empty() || radii.is_empty() {
        return Err(Error::InvalidParameter("probe needs at least one ray and one radius".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidParameter(format!("radii must be positive and finite (got {r})")));
    }
    for d in rays {
        check_unit(*d)?;
    }
    let probes: Vec<RayProbe> = rays.par_iter().map(|d| probe_ray(gas, t, *d, radii)).collect::<Result<_>>()?;

    let z = gas.impedance();
    let reference_bound = 1.0 + z + 1.0 / z;
    let mut max_magnitude = 0.0_f64;
    let mut limit_mismatch = Vec::new();
    let mut unbounded_trend = Vec::new();
    for idx in 0..16 {
        let limits: Vec<Complex64> = probes.iter().map(|p| p.multipliers[idx].limit).collect();
        let spread = limits.iter().flat_map(|a| limits.iter().map(move |b| (a - b).norm())).fold(0.0_f64, f64::max);
        if spread > LIMIT_MISMATCH_TOL {
            limit_mismatch.push(idx);
        }
        let mut unbounded = false;
        for p in &probes {
            let m = &p.multipliers[idx].magnitude;
            let peak = m.iter().copied().fold(0.0_f64, f64::max);
            max_magnitude = max_magnitude.max(peak);
            unbounded |= peak > reference_bound || grows_at_large_radii(radii, m);
        }
        if unbounded {
            unbounded_trend.push(idx);
        }
    }
    Ok(MultiplierProbeReport { t, reference_bound, max_magnitude, rays: probes, limit_mismatch, unbounded_trend })
}

/// Radii `10^e` for `e` from `lo` to `hi` in `per_decade` steps per decade.
pub fn log_radii(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let n = ((hi - lo) as usize) * per_decade.max(1);
    (0..=n).map(|i| 10f64.powf(lo as f64 + i as f64 / per_decade.max(1) as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gas() -> GasParameters {
        GasParameters::reference_air()
    }

    #[test]
    fn axial_roots() {
        let loc = resonance_locus(&gas(), -517.5575, [1.0, 0.0, 0.0]).unwrap();
        let plus = loc.roots.iter().find(|(w, _)| *w == Wave::AcousticPlus).unwrap().1;
        assert_relative_eq!(plus, 517.5575 / 425.0, max_relative = 1e-14);
        assert!(!loc.roots.iter().any(|(w, _)| *w == Wave::AcousticMinus));
        let adv = loc.roots.iter().find(|(w, _)| *w == Wave::Advective).unwrap().1;
        assert_relative_eq!(adv, 517.5575 / 80.0, max_relative = 1e-14);
    }

    #[test]
    fn transverse_roots() {
        let loc = resonance_locus(&gas(), -517.557_528_611_262_7, [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(loc.roots.len(), 1);
        assert_eq!(loc.roots[0].0, Wave::AcousticPlus);
        assert_relative_eq!(loc.roots[0].1, 1.500_166_749_597_862_8, max_relative = 1e-14);
        let loc = resonance_locus(&gas(), 517.5575, [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(loc.roots.len(), 1);
        assert_eq!(loc.roots[0].0, Wave::AcousticMinus);
        let loc = resonance_locus(&gas(), 0.0, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(loc.whole_ray, vec![Wave::Advective]);
        assert!(loc.roots.is_empty());
        assert!(resonance_locus(&gas(), 1.0, [1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn identity_probe_at_zero_time() {
        let rays = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let rep = multiplier_probe(&gas(), 0.0, &rays, &[1e-3, 1.0, 10.0]).unwrap();
        for ray in &rep.rays {
            for m in &ray.multipliers {
                let want = if m.row == m.col { 1.0 } else { 0.0 };
                assert!(m.magnitude.iter().all(|v| (v - want).abs() < 1e-15));
            }
        }
        assert!(rep.limit_mismatch.is_empty());
    }

    #[test]
    fn bounded_with_common_limits() {
        let s = 1.0 / 3f64.sqrt();
        let rays = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [s, s, s]];
        let rep = multiplier_probe(&gas(), 2.0, &rays, &log_radii(-12, 2, 2)).unwrap();
        assert!(rep.max_magnitude <= rep.reference_bound);
        assert!(rep.limit_mismatch.is_empty(), "{:?}", rep.limit_mismatch);
        assert!(rep.unbounded_trend.is_empty());
        for ray in &rep.rays {
            assert!((ray.multipliers[0].limit - 1.0).norm() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(multiplier_probe(&gas(), 1.0, &[[1.0, 0.0, 0.0]], &[0.0]).is_err());
        assert!(multiplier_probe(&gas(), 1.0, &[], &[1.0]).is_err());
        assert!(multiplier_probe(&gas(), 1.0, &[[2.0, 0.0, 0.0]], &[1.0]).is_err());
    }
}
