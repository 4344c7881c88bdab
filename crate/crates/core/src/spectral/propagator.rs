use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GasParameters;
use crate::solutions::cexpm1;

/// Below this `|ω_f + κ|` the forced multiplier uses its series limit.
pub const REMOVABLE_THRESHOLD: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Fourier coefficients `(F̂, Ĝ, Ĥ, P̂)` at wavenumber `α = (k, l, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub alpha: [f64; 3],
    pub values: [Complex64; 4],
}

impl SpectralCoefficients {
    pub fn new(alpha: [f64; 3], values: [Complex64; 4]) -> Self {
        SpectralCoefficients { alpha, values }
    }

    pub fn from_real(alpha: [f64; 3], values: [f64; 4]) -> Self {
        SpectralCoefficients { alpha, values: values.map(|v| Complex64::new(v, 0.0)) }
    }

    pub fn alpha_norm(&self) -> f64 {
        norm3(self.alpha)
    }
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// The three wave families of the coefficient dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    /// Frequency `kU0`.
    Advective,
    /// Frequency `kU0 − c0‖α‖`.
    AcousticMinus,
    /// Frequency `kU0 + c0‖α‖`.
    AcousticPlus,
}

impl Wave {
    pub const ALL: [Wave; 3] = [Wave::Advective, Wave::AcousticMinus, Wave::AcousticPlus];

    /// `κ` such that the homogeneous multiplier is `e^{−iκt}`.
    pub fn frequency(self, alpha: [f64; 3], gas: &GasParameters) -> f64 {
        let adv = alpha[0] * gas.u0();
        match self {
            Wave::Advective => adv,
            Wave::AcousticMinus => adv - gas.c0() * norm3(alpha),
            Wave::AcousticPlus => adv + gas.c0() * norm3(alpha),
        }
    }
}

/// Complex 4×4 matrix acting on `(v̂_x, v̂_y, v̂_z, p̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatorMatrix {
    pub entries: [[Complex64; 4]; 4],
}

impl PropagatorMatrix {
    pub fn identity() -> Self {
        let mut entries = [[ZERO; 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = ONE;
        }
        PropagatorMatrix { entries }
    }

    pub fn apply(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, row) in self.entries.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn compose(&self, rhs: &PropagatorMatrix) -> PropagatorMatrix {
        let entries = std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum())
        });
        PropagatorMatrix { entries }
    }

    /// `D·M·D⁻¹` with `D = diag(1, 1, 1, 1/(ρ0 c0))`, which is unitary for the
    /// homogeneous propagator.
    pub fn energy_scaled(&self, gas: &GasParameters) -> PropagatorMatrix {
        let z = gas.impedance();
        let d = [1.0, 1.0, 1.0, 1.0 / z];
        let mut entries = self.entries;
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e *= d[i] / d[j];
            }
        }
        PropagatorMatrix { entries }
    }

    /// `max |(U^H U − I)_ij|` of the energy-scaled matrix.
    pub fn unitarity_defect(&self, gas: &GasParameters) -> f64 {
        let u = self.energy_scaled(gas).entries;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                let g: Complex64 = (0..4).map(|k| u[k][i].conj() * u[k][j]).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Spectral projectors onto the advective, minus and plus families.
fn projectors(alpha: [f64; 3], gas: &GasParameters) -> Result<[[[Complex64; 4]; 4]; 3]> {
    let n = norm3(alpha);
    if n == 0.0 {
        return Err(Error::ExcludedWavenumber);
    }
    let n2 = n * n;
    let z = gas.impedance();
    let mut adv = [[ZERO; 4]; 4];
    let mut acoustic = [[ZERO; 4]; 4];
    // Half the antisymmetric acoustic coupling, `(Π₊ − Π₋)/2`.
    let mut split = [[ZERO; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            let aa = alpha[i] * alpha[j] / n2;
            let delta = if i == j { 1.0 } else { 0.0 };
            adv[i][j] = Complex64::new(delta - aa, 0.0);
            acoustic[i][j] = Complex64::new(aa, 0.0);
        }
        split[i][3] = Complex64::new(alpha[i] / (2.0 * z * n), 0.0);
        split[3][i] = Complex64::new(z * alpha[i] / (2.0 * n), 0.0);
    }
    acoustic[3][3] = ONE;
    let mut minus = [[ZERO; 4]; 4];
    let mut plus = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            minus[i][j] = 0.5 * acoustic[i][j] - split[i][j];
            plus[i][j] = 0.5 * acoustic[i][j] + split[i][j];
        }
    }
    Ok([adv, minus, plus])
}

fn combine(proj: &[[[Complex64; 4]; 4]; 3], weights: [Complex64; 3]) -> PropagatorMatrix {
    let mut entries = [[ZERO; 4]; 4];
    for (p, w) in proj.iter().zip(weights) {
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] += p[i][j] * w;
            }
        }
    }
    PropagatorMatrix { entries }
}

/// Homogeneous propagator at `(α, t)`.
pub fn propagator_matrix(alpha: [f64; 3], gas: &GasParameters, t: f64) -> Result<PropagatorMatrix> {
    let proj = projectors(alpha, gas)?;
    if t == 0.0 {
        return Ok(PropagatorMatrix::identity());
    }
    let w = Wave::ALL.map(|wave| Complex64::new(0.0, -wave.frequency(alpha, gas) * t).exp());
    Ok(combine(&proj, w))
}

/// `(e^{iωt} − e^{−iκt})/(i(ω + κ))`, the response of one family to the
/// source `e^{iωt}` switched on at `t = 0`.
pub fn forced_multiplier(kappa: f64, omega: f64, t: f64) -> Complex64 {
    let d = omega + kappa;
    let phase = Complex64::new(0.0, omega * t).exp();
    if d.abs() < REMOVABLE_THRESHOLD {
        return removable_limit(d, omega, t);
    }
    // e^{iωt}(1 − e^{−idt})/(id)
    -phase * cexpm1(Complex64::new(0.0, -d * t)) / Complex64::new(0.0, d)
}

/// Second-order expansion of [`forced_multiplier`] about `ω + κ = 0`.
pub fn removable_limit(d: f64, omega: f64, t: f64) -> Complex64 {
    let phase = Complex64::new(0.0, omega * t).exp();
    let x = d * t;
    phase * t * Complex64::new(1.0 - x * x / 6.0, -x / 2.0)
}

/// Response matrix to the source `e^{iω_f t}·amplitude`.
pub fn forced_propagator_matrix(
    alpha: [f64; 3],
    gas: &GasParameters,
    omega_f: f64,
    t: f64,
) -> Result<PropagatorMatrix> {
    let proj = projectors(alpha, gas)?;
    if t <= 0.0 {
        return Ok(PropagatorMatrix { entries: [[ZERO; 4]; 4] });
    }
    let w = Wave::ALL.map(|wave| forced_multiplier(wave.frequency(alpha, gas), omega_f, t));
    Ok(combine(&proj, w))
}

/// Coefficients at time `t` from the initial coefficients.
pub fn propagate(c: &SpectralCoefficients, gas: &GasParameters, t: f64) -> Result<[Complex64; 4]> {
    Ok(propagator_matrix(c.alpha, gas, t)?.apply(&c.values))
}

/// Coefficients at time `t` driven by `h(t)·e^{iω_f t}·amplitude`.
pub fn propagate_forced(
    amplitude: &SpectralCoefficients,
    gas: &GasParameters,
    omega_f: f64,
    t: f64,
) -> Result<[Complex64; 4]> {
    Ok(forced_propagator_matrix(amplitude.alpha, gas, omega_f, t)?.apply(&amplitude.values))
}

/// Right-hand side of the coefficient ODE.
pub fn coefficient_rhs(
    alpha: [f64; 3],
    gas: &GasParameters,
    u: &[Complex64; 4],
    source: Option<(f64, &[Complex64; 4])>,
    t: f64,
) -> [Complex64; 4] {
    let i = Complex64::i();
    let adv = -i * alpha[0] * gas.u0();
    let (rho0, c0) = (gas.rho0(), gas.c0());
    let mut out = [ZERO; 4];
    for d in 0..3 {
        out[d] = adv * u[d] - i * alpha[d] / rho0 * u[3];
    }
    out[3] = adv * u[3] - i * rho0 * c0 * c0 * (0..3).map(|d| alpha[d] * u[d]).sum::<Complex64>();
    if let Some((omega, amp)) = source {
        if t > 0.0 {
            let e = Complex64::new(0.0, omega * t).exp();
            for d in 0..4 {
                out[d] += e * amp[d];
            }
        }
    }
    out
}

/// Max component of `d/dt traj − rhs(traj)` at `t`, the derivative taken by
/// central differences with step `h`.
pub fn ode_residual<F>(
    traj: F,
    coefficients: &SpectralCoefficients,
    gas: &GasParameters,
    omega_f: Option<f64>,
    t: f64,
    h: f64,
) -> Result<f64>
where
    F: Fn(f64) -> [Complex64; 4],
{
    if !(h > 0.0 && t - h > 0.0) {
        return Err(Error::InvalidParameter(format!("need h > 0 and t - h > 0 (t = {t}, h = {h})")));
    }
    let up = traj(t + h);
    let down = traj(t - h);
    let mid = traj(t);
    let source = omega_f.map(|w| (w, &coefficients.values));
    let rhs = coefficient_rhs(coefficients.alpha, gas, &mid, source, t);
    Ok((0..4).map(|d| ((up[d] - down[d]) / (2.0 * h) - rhs[d]).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gas() -> GasParameters {
        GasParameters::reference_air()
    }

    #[test]
    fn identity_at_zero() {
        let m = propagator_matrix([0.3, -1.2, 0.7], &gas(), 0.0).unwrap();
        assert_eq!(m, PropagatorMatrix::identity());
        let tiny = propagator_matrix([0.3, -1.2, 0.7], &gas(), 1e-300).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((tiny.entries[i][j] - m.entries[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn axial_wave() {
        let g = gas();
        let t = 0.0123;
        let c = SpectralCoefficients::from_real([1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]);
        let out = propagate(&c, &g, t).unwrap();
        let carrier = Complex64::new(0.0, -80.0 * t).exp();
        let vx = carrier * (345.0 * t).cos();
        let p = -Complex64::i() * 1.2 * 345.0 * carrier * (345.0 * t).sin();
        assert!((out[0] - vx).norm() < 1e-14);
        assert!((out[3] - p).norm() < 1e-12);
        assert!(out[1].norm() < 1e-15 && out[2].norm() < 1e-15);
    }

    #[test]
    fn excludes_zero_wavenumber() {
        let c = SpectralCoefficients::from_real([0.0; 3], [1.0; 4]);
        assert_eq!(propagate(&c, &gas(), 1.0), Err(Error::ExcludedWavenumber));
    }

    #[test]
    fn energy_scaled_is_unitary() {
        let m = propagator_matrix([0.4, 1.1, -2.0], &gas(), 3.7).unwrap();
        assert!(m.unitarity_defect(&gas()) < 1e-13);
    }

    #[test]
    fn ode_residual_is_second_order() {
        let g = gas();
        let c = SpectralCoefficients::new(
            [0.02, -0.01, 0.015],
            [
                Complex64::new(1.0, 0.2),
                Complex64::new(-0.3, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(40.0, -10.0),
            ],
        );
        let traj = |t: f64| propagate(&c, &g, t).unwrap();
        let r1 = ode_residual(traj, &c, &g, None, 1.0, 1e-3).unwrap();
        let r2 = ode_residual(traj, &c, &g, None, 1.0, 5e-4).unwrap();
        let order = (r1 / r2).log2();
        assert!((1.8..=2.2).contains(&order), "{r1} {r2} {order}");
        let zero = SpectralCoefficients::from_real([0.1, 0.0, 0.0], [0.0; 4]);
        assert_eq!(ode_residual(|_| [ZERO; 4], &zero, &g, None, 1.0, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn series_agrees_with_direct_formula() {
        for d in [1e-6, -1e-7, 3e-7] {
            let direct =
                -Complex64::new(0.0, 1.3).exp() * cexpm1(Complex64::new(0.0, -d * 2.0)) / Complex64::new(0.0, d);
            let series = removable_limit(d, 0.65, 2.0);
            assert_relative_eq!((direct - series).norm() / direct.norm(), 0.0, epsilon = 1e-12);
        }
    }
}
