use super::forced::RESONANCE_TOL;
use crate::error::{Error, Result};
use crate::model::{Branch, FieldSample, Profile, Scenario};

fn only_active(s: &Scenario, branch: Branch) -> bool {
    s.active_branches().eq(std::iter::once(branch))
}

/// Secular solution of the acoustic branch forced at its own speed.
///
/// Requires only branch 1 active with `f1 = sin` and `ω_f = c1`.
pub fn closed_form_resonant(s: &Scenario, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample> {
    let omega = s.omega_f().map_err(|_| Error::NotResonant("scenario has no forcing".into()))?;
    if !only_active(s, Branch::AcousticSlow) || s.profile(Branch::AcousticSlow) != &Profile::Sin {
        return Err(Error::NotResonant("requires f1 = sin and f2 = f3 = f4 = 0".into()));
    }
    let c1 = s.characteristic_speeds()[0];
    if (omega - c1).abs() > RESONANCE_TOL * c1.abs().max(1.0) {
        return Err(Error::NotResonant(format!("omega_f = {omega} differs from c1 = {c1}")));
    }
    let out = FieldSample::zero_at(x, y, z, t);
    if t <= 0.0 || omega == 0.0 {
        return Ok(out);
    }
    let mode = s.mode(Branch::AcousticSlow);
    let arg = mode.phase(x, y, z) - omega * t;
    let wt = omega * t;
    let sw = wt.sin();
    let integral = 0.5 * arg.cos() * (t - (2.0 * wt).sin() / (2.0 * omega)) + arg.sin() * sw * sw / (2.0 * omega);
    let z0 = s.gas().impedance();
    Ok(out.with_components([mode.k * integral, mode.l * integral, mode.m * integral, -z0 * mode.wavenorm() * integral]))
}

/// Forced vortical branch with an exponential profile `f3 = e^{aξ}`,
/// `a = −μ/(k3 U0)`.
pub fn closed_form_exponential_forced(s: &Scenario, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample> {
    let unsupported = |m: &str| Error::UnsupportedClosedForm(m.into());
    let omega = s.omega_f().map_err(|_| unsupported("scenario has no forcing"))?;
    let a = match s.profile(Branch::VorticalY) {
        Profile::Exp { a } if only_active(s, Branch::VorticalY) => *a,
        _ => return Err(unsupported("requires f3 = exp(a·xi) and f1 = f2 = f4 = 0")),
    };
    let out = FieldSample::zero_at(x, y, z, t);
    let den = {
        let mode = s.mode(Branch::VorticalY);
        let mu = -a * mode.k * s.gas().u0();
        (mu, mu * mu + omega * omega)
    };
    let (mu, den) = den;
    if t <= 0.0 || den == 0.0 {
        return Ok(out);
    }
    let mode = s.mode(Branch::VorticalY);
    let wt = omega * t;
    let j = (omega - (-mu * t).exp() * (mu * wt.sin() + omega * wt.cos())) / den;
    let integral = (a * mode.phase(x, y, z) + mu * t).exp() * j;
    Ok(out.with_components([mode.l / mode.k * integral, -integral, 0.0, 0.0]))
}
