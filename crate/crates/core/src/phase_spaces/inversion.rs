use super::constants::{acoustic_weights, delta_vanishes, delta_with_scale};
use crate::error::{Error, Result};
use crate::field::FieldEvaluator;
use crate::model::{GasParameters, Profile, WaveMode};

/// Solves the representation `(F, G, H, P) = Σ_i coef_i·f_i` for the four
/// profiles, given data samples `(F, G, H, P)`.
#[derive(Debug, Clone, Copy)]
pub struct Inverter {
    modes: [WaveMode; 4],
    impedance: f64,
    weights: (f64, f64),
    norms: (f64, f64),
    delta: f64,
}

impl Inverter {
    pub fn new(modes: &[WaveMode; 4], gas: &GasParameters) -> Result<Self> {
        if let Some(i) = modes.iter().position(|m| m.k == 0.0) {
            return Err(Error::NonInvertible { condition: format!("k1·k2·k3·k4 ≠ 0 (k{} = 0)", i + 1) });
        }
        let (delta, scale) = delta_with_scale(modes, gas)?;
        if delta_vanishes(delta, scale) {
            return Err(Error::NonInvertible { condition: format!("Δ ≠ 0 (Δ = {delta:e})") });
        }
        Ok(Inverter {
            modes: *modes,
            impedance: gas.impedance(),
            weights: acoustic_weights(modes),
            norms: (modes[0].wavenorm(), modes[1].wavenorm()),
            delta,
        })
    }

    /// `(f1, f2, f3, f4)` such that the representation reproduces `data`
    /// at one point.
    pub fn solve(&self, data: [f64; 4]) -> [f64; 4] {
        let [f, g, h, p] = data;
        let [m1, m2, m3, m4] = &self.modes;
        let s = f + m3.l / m3.k * g + m4.m / m4.k * h;
        let (a1, a2) = self.weights;
        let (n1, n2) = self.norms;
        let z = self.impedance;
        let f1 = (z * n2 * s - a2 * p) / self.delta;
        let f2 = (z * n1 * s + a1 * p) / self.delta;
        let f3 = m1.l * f1 + m2.l * f2 - g;
        let f4 = m1.m * f1 + m2.m * f2 - h;
        [f1, f2, f3, f4]
    }

    /// `f_i(ξ)` for every branch, sampling the data at `(ξ/k_i, 0, 0)` where
    /// the branch-`i` phase equals `ξ`.
    pub fn profiles_at<E: FieldEvaluator + ?Sized>(&self, data: &E, xi: f64) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        let mut cache: Option<(f64, [f64; 4])> = None;
        for (i, (slot, mode)) in out.iter_mut().zip(&self.modes).enumerate() {
            let s = xi / mode.k;
            let sol = match cache {
                Some((cs, v)) if cs == s => v,
                _ => {
                    let v = self.solve(data.eval(s, 0.0, 0.0, 0.0)?.components());
                    cache = Some((s, v));
                    v
                }
            };
            *slot = sol[i];
        }
        Ok(out)
    }
}

/// Recovers the four profiles as tabulated profiles over `xi_samples`
/// (strictly increasing, at least two).
pub fn invert_representation<E: FieldEvaluator + ?Sized>(
    modes: &[WaveMode; 4],
    gas: &GasParameters,
    data: &E,
    xi_samples: &[f64],
) -> Result<[Profile; 4]> {
    let inv = Inverter::new(modes, gas)?;
    let mut knots: [Vec<(f64, f64)>; 4] = Default::default();
    for &xi in xi_samples {
        let f = inv.profiles_at(data, xi)?;
        for i in 0..4 {
            knots[i].push((xi, f[i]));
        }
    }
    let [k1, k2, k3, k4] = knots;
    Ok([Profile::tabulated(k1)?, Profile::tabulated(k2)?, Profile::tabulated(k3)?, Profile::tabulated(k4)?])
}
