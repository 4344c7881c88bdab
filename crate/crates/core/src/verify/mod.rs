//! Independent oracles: finite-difference residuals of the linearized
//! equations, curl estimates and direct quadrature of the Duhamel integrals.

mod residual;

pub use residual::{
    pde_residual, pde_residual_convergence, smooth_points, time_step, Forcing, ResidualReport, EQUATIONS, NOISE_MARGIN,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldEvaluator;
use crate::model::{Branch, FieldSample, Scenario};
use crate::solutions::{branch_coefficients, duhamel_integral_quadrature, QuadratureSpec};

/// `(∂v_x/∂y − ∂v_y/∂x, ∂v_y/∂z − ∂v_z/∂y, ∂v_z/∂x − ∂v_x/∂z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurlComponents {
    pub c_xy: f64,
    pub c_yz: f64,
    pub c_zx: f64,
}

impl CurlComponents {
    pub fn max_abs(&self) -> f64 {
        self.c_xy.abs().max(self.c_yz.abs()).max(self.c_zx.abs())
    }
}

/// Central-difference curl of the velocity at `point`.
pub fn curl_components<E: FieldEvaluator + ?Sized>(
    field: &E,
    point: [f64; 3],
    t: f64,
    h: f64,
) -> Result<CurlComponents> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive (got {h})")));
    }
    // d[a][b] = ∂v_b/∂x_a
    let mut d = [[0.0; 3]; 3];
    for (a, row) in d.iter_mut().enumerate() {
        let mut up = point;
        let mut down = point;
        up[a] += h;
        down[a] -= h;
        let vu = field.eval(up[0], up[1], up[2], t)?.components();
        let vd = field.eval(down[0], down[1], down[2], t)?.components();
        for (b, v) in row.iter_mut().enumerate() {
            *v = (vu[b] - vd[b]) / (2.0 * h);
        }
    }
    Ok(CurlComponents { c_xy: d[1][0] - d[0][1], c_yz: d[2][1] - d[1][2], c_zx: d[0][2] - d[2][0] })
}

/// The forced solution by adaptive quadrature of every branch integral, with
/// no closed-form dispatch. Also returns the summed error estimate.
pub fn duhamel_oracle_with_error(
    s: &Scenario,
    x: f64,
    y: f64,
    z: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<(FieldSample, f64)> {
    let omega = s.omega_f()?;
    let speeds = s.characteristic_speeds();
    let mut integrals = [0.0; 4];
    let mut error = 0.0;
    for b in Branch::ALL {
        let i = b.index();
        let xi0 = s.mode(b).phase(x, y, z);
        let (v, e) = duhamel_integral_quadrature(s.profile(b), xi0, speeds[i], omega, t, q)?;
        integrals[i] = v;
        error += e;
    }
    let coef = branch_coefficients(s);
    let mut out = [0.0; 4];
    for i in 0..4 {
        for c in 0..4 {
            out[c] += coef[i][c] * integrals[i];
        }
    }
    Ok((FieldSample::zero_at(x, y, z, t).with_components(out), error))
}

pub fn duhamel_oracle(s: &Scenario, x: f64, y: f64, z: f64, t: f64, q: &QuadratureSpec) -> Result<FieldSample> {
    Ok(duhamel_oracle_with_error(s, x, y, z, t, q)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::model::{GasParameters, Profile, WaveMode};
    use crate::solutions::{closed_form_exponential_forced, closed_form_resonant, ForcedField, InstantField};
    use std::f64::consts::PI;

    fn gas() -> GasParameters {
        GasParameters::reference_air()
    }

    #[test]
    fn vortical_sine_has_unit_curl() {
        let s = Scenario::single_branch(gas(), Branch::VorticalZ, WaveMode::new(1.0, 1.0, 1.0), Profile::Sin).unwrap();
        let c = curl_components(&InstantField::new(s), [0.0; 3], 0.0, 1e-4).unwrap();
        assert!((c.c_xy - 1.0).abs() < 1e-6, "{c:?}");
    }

    #[test]
    fn acoustic_branches_are_curl_free() {
        for b in [Branch::AcousticSlow, Branch::AcousticFast] {
            let s = Scenario::single_branch(gas(), b, WaveMode::new(0.7, -1.3, 0.4), Profile::Sin).unwrap();
            let c = curl_components(&InstantField::new(s), [0.3, -0.2, 1.1], 0.01, 1e-4).unwrap();
            assert!(c.max_abs() <= 1e-8, "{c:?}");
        }
        let zero = FnField::new(|_, _, _, _| [0.0; 4]);
        assert_eq!(curl_components(&zero, [1.0; 3], 1.0, 1e-3).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn forced_vortical_witness() {
        let s = Scenario::single_branch(gas(), Branch::VorticalZ, WaveMode::new(1.0, 1.0, 1.0), Profile::Sin)
            .unwrap()
            .with_forcing(80.0)
            .unwrap();
        let field = ForcedField::new(s, QuadratureSpec::default()).unwrap();
        let c = curl_components(&field, [160.0 - PI / 2.0, 0.0, 0.0], 2.0, 1e-4).unwrap();
        assert!(c.c_xy.abs() >= 0.5, "{c:?}");
    }

    #[test]
    fn oracle_matches_resonant_closed_form() {
        let m = WaveMode::new(1.0, 1.0, 1.0);
        let c1 = m.characteristic_speed(Branch::AcousticSlow, &gas());
        let s =
            Scenario::single_branch(gas(), Branch::AcousticSlow, m, Profile::Sin).unwrap().with_forcing(c1).unwrap();
        let q = QuadratureSpec::default();
        for (x, t) in [(0.3, 0.5), (-2.0, 3.0), (10.0, 7.5)] {
            let a = duhamel_oracle(&s, x, 0.1, -0.4, t, &q).unwrap().components();
            let b = closed_form_resonant(&s, x, 0.1, -0.4, t).unwrap().components();
            for i in 0..4 {
                assert!((a[i] - b[i]).abs() <= 1e-8 * (1.0 + t) * b[3].abs().max(1.0), "{a:?} {b:?}");
            }
        }
        assert_eq!(duhamel_oracle(&s, 1.0, 2.0, 3.0, 0.0, &q).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn oracle_matches_exponential_closed_form() {
        let s =
            Scenario::single_branch(gas(), Branch::VorticalY, WaveMode::new(1.0, 1.0, 1.0), Profile::Exp { a: -0.01 })
                .unwrap()
                .with_forcing(3.0)
                .unwrap();
        let q = QuadratureSpec::default();
        let a = duhamel_oracle(&s, 0.5, 0.0, 0.0, 2.0, &q).unwrap().components();
        let b = closed_form_exponential_forced(&s, 0.5, 0.0, 0.0, 2.0).unwrap().components();
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() <= 1e-8, "{a:?} {b:?}");
        }
    }

    #[test]
    fn oracle_requires_forcing() {
        let s = Scenario::single_branch(gas(), Branch::VorticalY, WaveMode::new(1.0, 1.0, 1.0), Profile::Sin).unwrap();
        assert!(duhamel_oracle(&s, 0.0, 0.0, 0.0, 1.0, &QuadratureSpec::default()).is_err());
    }
}
