use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GasParameters, WaveMode};

/// Relative threshold below which a determinant-like quantity counts as zero.
const ZERO_TOL: f64 = 1e-12;

/// Δ, m, M and (for compact supports) M′ of one mode set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepresentationConstants {
    pub delta: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub m_prime: Option<f64>,
}

impl RepresentationConstants {
    pub fn compute(modes: &[WaveMode; 4], gas: &GasParameters, support: Option<(f64, f64)>) -> Result<Self> {
        Ok(RepresentationConstants {
            delta: compute_delta(modes, gas)?,
            m: compute_m(modes, gas)?,
            big_m: compute_M(modes, gas)?,
            m_prime: support.map(|(a, b)| compute_m_prime(modes, gas, a, b)).transpose()?,
        })
    }
}

fn require_vortical_k(modes: &[WaveMode; 4]) -> Result<()> {
    if modes[2].k == 0.0 || modes[3].k == 0.0 {
        return Err(Error::Precondition("k3·k4 ≠ 0 is required".into()));
    }
    Ok(())
}

/// `(a1, a2)` with `a_i = k_i + l_i l3/k3 + m_i m4/k4`, the weights of f1 and f2
/// in `F + (l3/k3)G + (m4/k4)H`.
pub(crate) fn acoustic_weights(modes: &[WaveMode; 4]) -> (f64, f64) {
    let r3 = modes[2].l / modes[2].k;
    let r4 = modes[3].m / modes[3].k;
    let w = |m: &WaveMode| m.k + m.l * r3 + m.m * r4;
    (w(&modes[0]), w(&modes[1]))
}

/// Δ together with the magnitude it is compared against when testing Δ = 0.
pub(crate) fn delta_with_scale(modes: &[WaveMode; 4], gas: &GasParameters) -> Result<(f64, f64)> {
    require_vortical_k(modes)?;
    let z = gas.impedance();
    let (a1, a2) = acoustic_weights(modes);
    let (n1, n2) = (modes[0].wavenorm(), modes[1].wavenorm());
    let delta = z * (n1 * a2 + n2 * a1);
    let scale = z * (n1 * a2.abs() + n2 * a1.abs());
    Ok((delta, scale))
}

pub(crate) fn delta_vanishes(delta: f64, scale: f64) -> bool {
    delta.abs() <= ZERO_TOL * scale
}

/// Determinant of the map from `(f1, f2)` to `(F + (l3/k3)G + (m4/k4)H, P)`.
pub fn compute_delta(modes: &[WaveMode; 4], gas: &GasParameters) -> Result<f64> {
    Ok(delta_with_scale(modes, gas)?.0)
}

/// Constant bounding the initial data by the profile sups.
pub fn compute_m(modes: &[WaveMode; 4], gas: &GasParameters) -> Result<f64> {
    require_vortical_k(modes)?;
    let [m1, m2, m3, m4] = modes;
    let rows = [
        m1.k.abs() + m2.k.abs() + (m3.l / m3.k).abs() + (m4.m / m4.k).abs(),
        m1.l.abs() + m2.l.abs() + 1.0,
        m1.m.abs() + m2.m.abs() + 1.0,
        gas.impedance() * (m1.wavenorm() + m2.wavenorm()),
    ];
    Ok(rows.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// The seven entries whose maximum is `M`, in the published order.
pub fn big_m_entries(modes: &[WaveMode; 4], gas: &GasParameters) -> Result<[f64; 7]> {
    let (delta, scale) = delta_with_scale(modes, gas)?;
    if delta_vanishes(delta, scale) {
        return Err(Error::Degenerate { condition: format!("Δ = 0 (Δ = {delta:e})") });
    }
    let [m1, m2, m3, m4] = modes;
    let ad = delta.abs();
    let zd = gas.impedance() / ad;
    let (n1, n2) = (m1.wavenorm(), m2.wavenorm());
    let r3 = (m3.l / m3.k).abs();
    let r4 = (m4.m / m4.k).abs();
    let s = 1.0 + r3 + r4;
    let q3 = m3.l / m3.k;
    let q4 = m4.m / m4.k;
    Ok([
        zd * n2 * s + (m2.k.abs() + (m2.l * q3).abs() + (m2.m * q4).abs()) / ad,
        zd * n1 * s + (m1.k.abs() + (m1.l * q3).abs() + (m1.m * q4).abs()) / ad,
        zd * (n2 * m1.l.abs() * s + n1 * m2.l.abs() * s),
        1.0,
        ((m2.l * m1.k).abs() + (m2.l * m1.m * q4).abs() + (m1.l * m2.k).abs() + (m1.l * m2.m * q4).abs()) / ad,
        zd * (n2 * m1.m.abs() * s + n1 * m2.m.abs() * s),
        ((m2.m * m1.k).abs() + (m2.m * m1.l * q3).abs() + (m1.m * m2.k).abs() + (m1.m * m2.l * q3).abs()) / ad,
    ])
}

/// Constant bounding the recovered profiles by the data sup.
#[allow(non_snake_case)]
pub fn compute_M(modes: &[WaveMode; 4], gas: &GasParameters) -> Result<f64> {
    Ok(big_m_entries(modes, gas)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Constant bounding the forced solution for profiles supported in `[a, b]`.
pub fn compute_m_prime(modes: &[WaveMode; 4], gas: &GasParameters, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidParameter(format!("support [{a}, {b}] must have b > a")));
    }
    require_vortical_k(modes)?;
    let [m1, m2, m3, m4] = modes;
    let (u0, c0, z) = (gas.u0(), gas.c0(), gas.impedance());
    let (n1, n2) = (m1.wavenorm(), m2.wavenorm());
    let d1 = m1.k * u0 - c0 * n1;
    let d2 = m2.k * u0 + c0 * n2;
    if d1.abs() <= ZERO_TOL * (m1.k.abs() * u0 + c0 * n1) {
        return Err(Error::ResonantMode { branch: 1 });
    }
    if d2.abs() <= ZERO_TOL * (m2.k.abs() * u0 + c0 * n2) {
        return Err(Error::ResonantMode { branch: 2 });
    }
    let rows = [
        (m1.k / d1).abs() + (m2.k / d2).abs() + (m3.l / (m3.k * m3.k * u0)).abs() + (m4.m / (m4.k * m4.k * u0)).abs(),
        (m1.l / d1).abs() + (m2.l / d2).abs() + (1.0 / (m3.k * u0)).abs(),
        (m1.m / d1).abs() + (m2.m / d2).abs() + (1.0 / (m4.k * u0)).abs(),
        (z * n1 / d1).abs() + (z * n2 / d2).abs(),
    ];
    Ok((b - a) * rows.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ONES: WaveMode = WaveMode::new(1.0, 1.0, 1.0);

    fn gas() -> GasParameters {
        GasParameters::reference_air()
    }

    #[test]
    fn delta_reference_and_degenerate() {
        let g = gas();
        assert_relative_eq!(compute_delta(&[ONES; 4], &g).unwrap(), 4_302.414_206_001_091, max_relative = 1e-14);
        let degenerate = [ONES, ONES.negated(), ONES, ONES];
        assert_eq!(compute_delta(&degenerate, &g).unwrap(), 0.0);
        let bad = [ONES, ONES, WaveMode::new(0.0, 1.0, 1.0), ONES];
        assert!(matches!(compute_delta(&bad, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn m_reference_values() {
        let g = gas();
        assert_relative_eq!(compute_m(&[ONES; 4], &g).unwrap(), 1434.1380686670304, max_relative = 1e-14);
        let axis = [WaveMode::new(1.0, 0.0, 0.0); 4];
        assert_relative_eq!(compute_m(&axis, &g).unwrap(), 828.0, max_relative = 1e-14);
    }

    #[test]
    fn big_m_entries_for_unit_impedance() {
        let g = GasParameters::new(80.0, 1.0, 1.0).unwrap();
        let e = big_m_entries(&[ONES; 4], &g).unwrap();
        let expected = [0.788_675_13, 0.788_675_13, 1.0, 1.0, 0.384_900_18, 1.0, 0.384_900_18];
        for (a, b) in e.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-8);
        }
        assert_relative_eq!(compute_M(&[ONES; 4], &g).unwrap(), 1.0, epsilon = 1e-14);
        let degenerate = [ONES, ONES.negated(), ONES, ONES];
        assert!(matches!(compute_M(&degenerate, &g), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn m_prime_reference_and_scaling() {
        let g = gas();
        let mp = compute_m_prime(&[ONES; 4], &g, -1.0, 1.0).unwrap();
        assert_relative_eq!(mp, 4.887_602_480_929_636, max_relative = 1e-13);
        let doubled = compute_m_prime(&[ONES; 4], &g, -2.0, 2.0).unwrap();
        assert_relative_eq!(doubled, 2.0 * mp, max_relative = 1e-15);
        assert!(compute_m_prime(&[ONES; 4], &g, 1.0, 1.0).is_err());
    }

    #[test]
    fn m_prime_detects_sonic_denominator() {
        // k1 U0 = c0 ‖α1‖ for a mode along x when U0 = c0.
        let g = GasParameters::new(345.0, 1.2, 345.0).unwrap();
        let modes = [WaveMode::new(1.0, 0.0, 0.0), ONES, ONES, ONES];
        assert_eq!(compute_m_prime(&modes, &g, 0.0, 1.0), Err(Error::ResonantMode { branch: 1 }));
    }
}
