use super::{branch_coefficients, combine};
use crate::error::Result;
use crate::field::FieldEvaluator;
use crate::model::{signed_log_sum, Branch, Extended, FieldSample, Scenario};

fn branch_arguments(s: &Scenario, x: f64, y: f64, z: f64, t: f64) -> [f64; 4] {
    let speeds = s.characteristic_speeds();
    Branch::ALL.map(|b| s.mode(b).phase(x, y, z) - speeds[b.index()] * t)
}

fn instant_components(s: &Scenario, x: f64, y: f64, z: f64, t: f64) -> [f64; 4] {
    let xi = branch_arguments(s, x, y, z, t);
    let values = Branch::ALL.map(|b| s.profile(b).value(xi[b.index()]));
    combine(&branch_coefficients(s), values)
}

/// `(F, G, H, P)` at a point: the instantaneous solution at `t = 0`.
pub fn initial_data(s: &Scenario, x: f64, y: f64, z: f64) -> [f64; 4] {
    instant_components(s, x, y, z, 0.0)
}

/// The instantaneous plane-wave solution at `(x, y, z, t)`.
pub fn evaluate_instant(s: &Scenario, x: f64, y: f64, z: f64, t: f64) -> FieldSample {
    FieldSample::zero_at(x, y, z, t).with_components(instant_components(s, x, y, z, t))
}

fn ln_abs_components(s: &Scenario, x: f64, y: f64, z: f64, t: f64) -> [f64; 4] {
    let xi = branch_arguments(s, x, y, z, t);
    let logs = Branch::ALL.map(|b| s.profile(b).signed_ln(xi[b.index()]));
    let coef = branch_coefficients(s);
    let mut out = [f64::NEG_INFINITY; 4];
    for (c, slot) in out.iter_mut().enumerate() {
        let terms = (0..4).filter(|i| coef[*i][c] != 0.0).map(|i| {
            let (sign, l) = logs[i];
            (sign * coef[i][c].signum(), l + coef[i][c].abs().ln())
        });
        *slot = signed_log_sum(terms).1;
    }
    out
}

fn triangle_bound(s: &Scenario, sups: [Extended; 4]) -> Extended {
    let coef = branch_coefficients(s);
    (0..4)
        .map(|c| (0..4).fold(Extended::Finite(0.0), |acc, i| acc + sups[i].scale(coef[i][c].abs())))
        .fold(Extended::Finite(0.0), |m, v| if v.to_f64() > m.to_f64() { v } else { m })
}

/// [`evaluate_instant`] as a [`FieldEvaluator`].
#[derive(Debug, Clone)]
pub struct InstantField {
    scenario: Scenario,
}

impl InstantField {
    pub fn new(scenario: Scenario) -> Self {
        InstantField { scenario }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }
}

impl FieldEvaluator for InstantField {
    fn eval(&self, x: f64, y: f64, z: f64, t: f64) -> Result<FieldSample> {
        Ok(evaluate_instant(&self.scenario, x, y, z, t))
    }

    fn ln_abs(&self, x: f64, y: f64, z: f64, t: f64) -> Result<[f64; 4]> {
        Ok(ln_abs_components(&self.scenario, x, y, z, t))
    }

    /// Triangle bound `max_c Σ_i |coef_ic|·sup|f_i|`, the same at every `t`.
    fn sup_bound(&self, _t: f64) -> Extended {
        triangle_bound(&self.scenario, self.scenario.profiles().clone().map(|p| p.sup()))
    }
}

/// `(F, G, H, P)` as a time-independent [`FieldEvaluator`].
#[derive(Debug, Clone)]
pub struct InitialDataField {
    scenario: Scenario,
}

impl InitialDataField {
    pub fn new(scenario: Scenario) -> Self {
        InitialDataField { scenario }
    }
}

impl FieldEvaluator for InitialDataField {
    fn eval(&self, x: f64, y: f64, z: f64, _t: f64) -> Result<FieldSample> {
        Ok(FieldSample::zero_at(x, y, z, 0.0).with_components(initial_data(&self.scenario, x, y, z)))
    }

    fn ln_abs(&self, x: f64, y: f64, z: f64, _t: f64) -> Result<[f64; 4]> {
        Ok(ln_abs_components(&self.scenario, x, y, z, 0.0))
    }

    fn sup_bound(&self, _t: f64) -> Extended {
        triangle_bound(&self.scenario, self.scenario.profiles().clone().map(|p| p.sup()))
    }
}

pub(crate) fn bound_from_branch_sups(s: &Scenario, sups: [Extended; 4]) -> Extended {
    triangle_bound(s, sups)
}
