use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::instant::bound_from_branch_sups;
use super::quadrature::{integrate, QuadratureSpec};
use super::{branch_coefficients, combine};
use crate::error::Result;
use crate::field::FieldEvaluator;
use crate::model::{Branch, ExpTerm, Extended, FieldSample, Profile, Scenario, Support};

/// Relative tolerance under which `ω_f ± c_i` counts as exactly resonant.
pub(crate) const RESONANCE_TOL: f64 = 1e-9;

/// How one branch's Duhamel integral was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPath {
    Inactive,
    ClosedForm,
    Quadrature,
}

/// A forced sample together with evaluation metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcedEvaluation {
    pub sample: FieldSample,
    pub paths: [BranchPath; 4],
    /// Branches whose speed matched `±ω_f` within [`RESONANCE_TOL`].
    pub resonant: [bool; 4],
    /// Sum of quadrature error estimates over the branches that used quadrature.
    pub quadrature_error: f64,
    /// Set when some profile is not C¹, so the result is not a classical solution.
    pub non_c1: bool,
}

/// `expm1` on the complex plane.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

/// `∫_0^Δ e^{zs} ds`.
fn exp_integral(z: Complex64, width: f64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        Complex64::new(width, 0.0)
    } else {
        cexpm1(z * width) / z
    }
}

fn snap(z: Complex64, scale: f64) -> (Complex64, bool) {
    if z.norm() <= RESONANCE_TOL * scale.max(1.0) {
        (Complex64::new(0.0, 0.0), true)
    } else {
        (z, false)
    }
}

/// τ-interval of `[0, t]` on which `ξ0 − c(t − τ)` lies in `[lo, hi]`.
fn tau_window(xi0: f64, c: f64, t: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if c == 0.0 {
        return (xi0 >= lo && xi0 <= hi).then_some((0.0, t));
    }
    let a = t - (xi0 - lo) / c;
    let b = t - (xi0 - hi) / c;
    let (a, b) = (a.min(b).max(0.0), a.max(b).min(t));
    (a < b).then_some((a, b))
}

/// Closed-form `∫ Re[C·e^{λ(ξ0 − c(t−τ))}]·sin ωτ dτ` over the term's window.
fn exp_term_integral(term: &ExpTerm, xi0: f64, c: f64, omega: f64, t: f64) -> (f64, bool) {
    let (lo, hi) = match term.window {
        None => (0.0, t),
        Some((wa, wb)) => match tau_window(xi0, c, t, wa, wb) {
            Some(w) => w,
            None => return (0.0, false),
        },
    };
    let lam = term.rate;
    let base = lam * (xi0 - c * t);
    let lc = lam * c;
    let w = Complex64::new(0.0, omega);
    let scale = lc.norm().max(omega.abs());
    let (zp, rp) = snap(lc + w, scale);
    let (zm, rm) = snap(lc - w, scale);
    let width = hi - lo;
    let plus = (base + zp * lo).exp() * exp_integral(zp, width);
    let minus = (base + zm * lo).exp() * exp_integral(zm, width);
    let value = term.coeff * (plus - minus) / Complex64::new(0.0, 2.0);
    (value.re, rp || rm)
}

/// Pure adaptive quadrature of `∫_0^t f(ξ0 − c(t−τ))·sin ωτ dτ`, clipped to
/// the profile support and split at its breakpoints.
pub(crate) fn duhamel_integral_quadrature(
    profile: &Profile,
    xi0: f64,
    c: f64,
    omega: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<(f64, f64)> {
    q.validate()?;
    if t <= 0.0 || profile.is_zero() {
        return Ok((0.0, 0.0));
    }
    let (lo, hi) = match profile.support() {
        Support::Empty => return Ok((0.0, 0.0)),
        Support::Unbounded => (0.0, t),
        Support::Interval { lo, hi } => match tau_window(xi0, c, t, lo, hi) {
            Some(w) => w,
            None => return Ok((0.0, 0.0)),
        },
    };
    let breaks: Vec<f64> =
        if c == 0.0 { Vec::new() } else { profile.breakpoints().iter().map(|b| t - (xi0 - b) / c).collect() };
    let panels = ((omega.abs() + c.abs()) * (hi - lo) / PI).ceil() as usize;
    let panels = panels.min(q.max_subdivisions / 4).max(1);
    let integrand = |tau: f64| profile.value(xi0 - c * (t - tau)) * (omega * tau).sin();
    let r = integrate(integrand, lo, hi, &breaks, panels, q)?;
    Ok((r.value, r.error))
}

fn branch_integral(
    profile: &Profile,
    xi0: f64,
    c: f64,
    omega: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<(f64, BranchPath, bool, f64)> {
    if profile.is_zero() {
        return Ok((0.0, BranchPath::Inactive, false, 0.0));
    }
    let resonant = (c.abs() - omega.abs()).abs() <= RESONANCE_TOL * c.abs().max(1.0);
    if omega == 0.0 {
        return Ok((0.0, BranchPath::ClosedForm, resonant, 0.0));
    }
    if c == 0.0 {
        // The argument is frozen at ξ0.
        let v = profile.value(xi0) * (1.0 - (omega * t).cos()) / omega;
        return Ok((v, BranchPath::ClosedForm, resonant, 0.0));
    }
    if let Some(terms) = profile.exponential_terms() {
        let mut acc = 0.0;
        let mut snapped = false;
        for term in &terms {
            let (v, r) = exp_term_integral(term, xi0, c, omega, t);
            acc += v;
            snapped |= r;
        }
        if acc.is_finite() {
            return Ok((acc, BranchPath::ClosedForm, resonant || snapped, 0.0));
        }
    }
    let (v, err) = duhamel_integral_quadrature(profile, xi0, c, omega, t, q)?;
    Ok((v, BranchPath::Quadrature, resonant, err))
}

/// [`evaluate_forced`] with the dispatch metadata.
pub fn evaluate_forced_traced(
    s: &Scenario,
    x: f64,
    y: f64,
    z: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<ForcedEvaluation> {
    let omega = s.omega_f()?;
    q.validate()?;
    let mut out = ForcedEvaluation {
        sample: FieldSample::zero_at(x, y, z, t),
        paths: [BranchPath::Inactive; 4],
        resonant: [false; 4],
        quadrature_error: 0.0,
        non_c1: !s.is_c1(),
    };
    if t <= 0.0 {
        return Ok(out);
    }
    let speeds = s.characteristic_speeds();
    let mut integrals = [0.0; 4];
    for b in Branch::ALL {
        let i = b.index();
        let xi0 = s.mode(b).phase(x, y, z);
        let (v, path, res, err) = branch_integral(s.profile(b), xi0, speeds[i], omega, t, q)?;
        integrals[i] = v;
        out.paths[i] = path;
        out.resonant[i] = res;
        out.quadrature_error += err;
    }
    out.sample = out.sample.with_components(combine(&branch_coefficients(s), integrals));
    Ok(out)
}

/// The forced Duhamel solution at `(x, y, z, t)`; zero for `t ≤ 0`.
pub fn evaluate_forced(s: &Scenario, x: f64, y: f64, z: f64, t: f64, q: &QuadratureSpec) -> Result<FieldSample> {
    Ok(evaluate_forced_traced(s, x, y, z, t, q)?.sample)
}

/// [`evaluate_forced`] as a [`FieldEvaluator`].
#[derive(Debug, Clone)]
pub struct ForcedField {
    scenario: Scenario,
    quadrature: QuadratureSpec,
}

impl ForcedField {
    pub fn new(scenario: Scenario, quadrature: QuadratureSpec) -> Result<Self> {
        scenario.omega_f()?;
        quadrature.validate()?;
        Ok(ForcedField { scenario, quadrature })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }
}

impl FieldEvaluator for ForcedField {
    fn eval(&self, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample> {
        evaluate_forced(&self.scenario, x, y, z, t, &self.quadrature)
    }

    /// Per branch `|I_i| ≤ min(t, |supp f_i|/|c_i|)·sup|f_i|`.
    fn sup_bound(&self, t: f64) -> Extended {
        if t <= 0.0 {
            return Extended::Finite(0.0);
        }
        let speeds = self.scenario.characteristic_speeds();
        let sups = Branch::ALL.map(|b| {
            let p = self.scenario.profile(b);
            let sup = p.sup();
            let by_time = sup.scale(t);
            match p.support() {
                Support::Interval { lo, hi } if speeds[b.index()] != 0.0 => {
                    let by_support = sup.scale((hi - lo) / speeds[b.index()].abs());
                    if by_support.to_f64() < by_time.to_f64() {
                        by_support
                    } else {
                        by_time
                    }
                }
                Support::Empty => Extended::Finite(0.0),
                _ => by_time,
            }
        });
        bound_from_branch_sups(&self.scenario, sups)
    }
}
