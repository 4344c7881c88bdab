use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Extended, Support};
use crate::error::{Error, Result};

/// Scalar profile `f_i: ℝ → ℝ` carried along one characteristic family.
///
/// The catalog covers the closed forms needed by the explicit solutions
/// (trigonometric, exponential, Gaussian-growth, mollifier and truncated
/// sine), plus tabulated data and linear combinations of those.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    Sin,
    Cos,
    /// `e^{a·ξ}`
    Exp {
        a: f64,
    },
    /// `e^{ξ²}`
    SquareExp,
    /// C^∞ cutoff equal to 1 on `|ξ| ≤ r` and 0 on `|ξ| ≥ r + 1`.
    SmoothBump {
        r: f64,
    },
    /// `sin ξ` on `[a, b]`, zero elsewhere. Discontinuous at the ends.
    TruncatedSin {
        a: f64,
        b: f64,
    },
    /// Piecewise-linear through `(ξ, value)` knots, zero outside them.
    Tabulated {
        knots: Vec<(f64, f64)>,
    },
    Scaled {
        factor: f64,
        profile: Box<Profile>,
    },
    Sum {
        terms: Vec<Profile>,
    },
}

/// One term `Re[coeff · e^{rate·ξ}]`, optionally restricted to `window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coeff: Complex64,
    pub rate: Complex64,
    pub window: Option<(f64, f64)>,
}

fn bump_psi(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = bump_psi(s);
        a / (a + bump_psi(1.0 - s))
    }
}

fn smooth_step_derivative(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let a = bump_psi(s);
    let b = bump_psi(1.0 - s);
    let den = a + b;
    a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / (den * den)
}

/// Largest `|sin ξ|` on `[a, b]`.
fn sin_sup_on(a: f64, b: f64) -> f64 {
    let n = ((a - FRAC_PI_2) / PI).ceil();
    if FRAC_PI_2 + n * PI <= b {
        1.0
    } else {
        a.sin().abs().max(b.sin().abs())
    }
}

impl Profile {
    pub fn scaled(self, factor: f64) -> Profile {
        Profile::Scaled { factor, profile: Box::new(self) }
    }

    pub fn sum(terms: Vec<Profile>) -> Profile {
        Profile::Sum { terms }
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Profile> {
        let p = Profile::Tabulated { knots };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Exp { a } if !a.is_finite() => {
                Err(Error::InvalidParameter(format!("exp rate must be finite, got {a}")))
            }
            Profile::SmoothBump { r } if !(r.is_finite() && *r >= 0.0) => {
                Err(Error::InvalidParameter(format!("bump radius must be >= 0, got {r}")))
            }
            Profile::TruncatedSin { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                Err(Error::InvalidParameter(format!("truncation interval [{a}, {b}] is empty")))
            }
            Profile::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidParameter("tabulated profile needs >= 2 knots".into()));
                }
                if knots.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidParameter("tabulated knots must be finite".into()));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidParameter("tabulated knots must be strictly increasing".into()));
                }
                Ok(())
            }
            Profile::Scaled { factor, profile } => {
                if !factor.is_finite() {
                    return Err(Error::InvalidParameter(format!("scale factor {factor}")));
                }
                profile.validate()
            }
            Profile::Sum { terms } => terms.iter().try_for_each(Profile::validate),
            _ => Ok(()),
        }
    }

    pub fn value(&self, xi: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Sin => xi.sin(),
            Profile::Cos => xi.cos(),
            Profile::Exp { a } => (a * xi).exp(),
            Profile::SquareExp => (xi * xi).exp(),
            Profile::SmoothBump { r } => smooth_step(r + 1.0 - xi.abs()),
            Profile::TruncatedSin { a, b } => {
                if xi >= *a && xi <= *b {
                    xi.sin()
                } else {
                    0.0
                }
            }
            Profile::Tabulated { knots } => tabulated_value(knots, xi),
            Profile::Scaled { factor, profile } => factor * profile.value(xi),
            Profile::Sum { terms } => terms.iter().map(|p| p.value(xi)).sum(),
        }
    }

    pub fn derivative(&self, xi: f64) -> Result<f64> {
        Ok(match self {
            Profile::Zero => 0.0,
            Profile::Sin => xi.cos(),
            Profile::Cos => -xi.sin(),
            Profile::Exp { a } => a * (a * xi).exp(),
            Profile::SquareExp => 2.0 * xi * (xi * xi).exp(),
            Profile::SmoothBump { r } => -xi.signum() * smooth_step_derivative(r + 1.0 - xi.abs()),
            Profile::TruncatedSin { a, b } => {
                if xi == *a || xi == *b {
                    return Err(Error::NonDifferentiable { xi });
                }
                if xi > *a && xi < *b {
                    xi.cos()
                } else {
                    0.0
                }
            }
            Profile::Tabulated { knots } => tabulated_slope(knots, xi),
            Profile::Scaled { factor, profile } => factor * profile.derivative(xi)?,
            Profile::Sum { terms } => {
                let mut acc = 0.0;
                for p in terms {
                    acc += p.derivative(xi)?;
                }
                acc
            }
        })
    }

    /// `(sign, ln|f(ξ)|)`, computed without overflow for the exponential
    /// variants. The logarithm is `−∞` where the profile vanishes.
    pub fn signed_ln(&self, xi: f64) -> (f64, f64) {
        match self {
            Profile::Exp { a } => (1.0, a * xi),
            Profile::SquareExp => (1.0, xi * xi),
            Profile::Scaled { factor, profile } => {
                let (s, l) = profile.signed_ln(xi);
                (s * factor.signum(), l + factor.abs().ln())
            }
            Profile::Sum { terms } => signed_log_sum(terms.iter().map(|p| p.signed_ln(xi))),
            _ => {
                let v = self.value(xi);
                if v == 0.0 {
                    (0.0, f64::NEG_INFINITY)
                } else {
                    (v.signum(), v.abs().ln())
                }
            }
        }
    }

    /// `sup_ξ |f(ξ)|`: exact for the primitive variants, a triangle-inequality
    /// bound for sums.
    pub fn sup(&self) -> Extended {
        match self {
            Profile::Zero => Extended::Finite(0.0),
            Profile::Sin | Profile::Cos => Extended::Finite(1.0),
            Profile::Exp { a } => {
                if *a == 0.0 {
                    Extended::Finite(1.0)
                } else {
                    Extended::PosInf
                }
            }
            Profile::SquareExp => Extended::PosInf,
            Profile::SmoothBump { .. } => Extended::Finite(1.0),
            Profile::TruncatedSin { a, b } => Extended::Finite(sin_sup_on(*a, *b)),
            Profile::Tabulated { knots } => Extended::Finite(knots.iter().fold(0.0_f64, |m, (_, v)| m.max(v.abs()))),
            Profile::Scaled { factor, profile } => {
                if *factor == 0.0 {
                    Extended::Finite(0.0)
                } else {
                    profile.sup().scale(factor.abs())
                }
            }
            Profile::Sum { terms } => terms.iter().fold(Extended::Finite(0.0), |acc, p| acc + p.sup()),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Profile::Zero => Support::Empty,
            Profile::SmoothBump { r } => Support::Interval { lo: -r - 1.0, hi: r + 1.0 },
            Profile::TruncatedSin { a, b } => Support::Interval { lo: *a, hi: *b },
            Profile::Tabulated { knots } => Support::Interval { lo: knots[0].0, hi: knots[knots.len() - 1].0 },
            Profile::Scaled { factor, profile } => {
                if *factor == 0.0 {
                    Support::Empty
                } else {
                    profile.support()
                }
            }
            Profile::Sum { terms } => terms.iter().fold(Support::Empty, |acc, p| acc.hull(&p.support())),
            Profile::Sin | Profile::Cos | Profile::Exp { .. } | Profile::SquareExp => Support::Unbounded,
        }
    }

    /// Whether the profile is continuously differentiable on all of ℝ.
    pub fn is_c1(&self) -> bool {
        match self {
            Profile::TruncatedSin { .. } | Profile::Tabulated { .. } => false,
            Profile::Scaled { profile, .. } => profile.is_c1(),
            Profile::Sum { terms } => terms.iter().all(Profile::is_c1),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Scaled { factor, profile } => *factor == 0.0 || profile.is_zero(),
            Profile::Sum { terms } => terms.iter().all(Profile::is_zero),
            _ => false,
        }
    }

    /// Points where the profile or its derivatives jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::SmoothBump { r } => vec![-r - 1.0, -r, *r, r + 1.0],
            Profile::TruncatedSin { a, b } => vec![*a, *b],
            Profile::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
            Profile::Scaled { profile, .. } => profile.breakpoints(),
            Profile::Sum { terms } => {
                let mut out: Vec<f64> = terms.iter().flat_map(Profile::breakpoints).collect();
                out.sort_by(f64::total_cmp);
                out.dedup();
                out
            }
            _ => Vec::new(),
        }
    }

    /// Decomposition into `Re[c·e^{λξ}]` terms, when one exists.
    pub fn exponential_terms(&self) -> Option<Vec<ExpTerm>> {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        match self {
            Profile::Zero => Some(Vec::new()),
            Profile::Sin => Some(vec![ExpTerm { coeff: -i, rate: i, window: None }]),
            Profile::Cos => Some(vec![ExpTerm { coeff: one, rate: i, window: None }]),
            Profile::Exp { a } => Some(vec![ExpTerm { coeff: one, rate: Complex64::new(*a, 0.0), window: None }]),
            Profile::TruncatedSin { a, b } => Some(vec![ExpTerm { coeff: -i, rate: i, window: Some((*a, *b)) }]),
            Profile::Scaled { factor, profile } => profile
                .exponential_terms()
                .map(|terms| terms.into_iter().map(|t| ExpTerm { coeff: t.coeff * factor, ..t }).collect()),
            Profile::Sum { terms } => {
                let mut out = Vec::new();
                for p in terms {
                    out.extend(p.exponential_terms()?);
                }
                Some(out)
            }
            Profile::SquareExp | Profile::SmoothBump { .. } | Profile::Tabulated { .. } => None,
        }
    }
}

/// Signed log-sum-exp: returns `(sign, ln|Σ s_i e^{l_i}|)`.
pub(crate) fn signed_log_sum(terms: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let terms: Vec<(f64, f64)> = terms.filter(|(s, l)| *s != 0.0 && *l > f64::NEG_INFINITY).collect();
    let top = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    if top == f64::INFINITY {
        return (1.0, f64::INFINITY);
    }
    let acc: f64 = terms.iter().map(|(s, l)| s * (l - top).exp()).sum();
    if acc == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (acc.signum(), top + acc.abs().ln())
    }
}

fn segment(knots: &[(f64, f64)], xi: f64) -> Option<usize> {
    let n = knots.len();
    if xi < knots[0].0 || xi > knots[n - 1].0 {
        return None;
    }
    let idx = knots.partition_point(|k| k.0 <= xi);
    Some(idx.saturating_sub(1).min(n - 2))
}

fn tabulated_value(knots: &[(f64, f64)], xi: f64) -> f64 {
    match segment(knots, xi) {
        None => 0.0,
        Some(j) => {
            let (x0, v0) = knots[j];
            let (x1, v1) = knots[j + 1];
            v0 + (v1 - v0) * (xi - x0) / (x1 - x0)
        }
    }
}

fn tabulated_slope(knots: &[(f64, f64)], xi: f64) -> f64 {
    match segment(knots, xi) {
        None => 0.0,
        Some(j) => {
            let (x0, v0) = knots[j];
            let (x1, v1) = knots[j + 1];
            (v1 - v0) / (x1 - x0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn catalog_values() {
        assert_eq!(Profile::Sin.value(FRAC_PI_2), 1.0);
        assert_eq!(Profile::Zero.value(17.3), 0.0);
        assert_relative_eq!(
            Profile::Exp { a: -1.0 / 80.0 }.value(80.0),
            0.367_879_441_171_442_33,
            max_relative = 1e-15
        );
    }

    #[test]
    fn catalog_sups() {
        assert_eq!(Profile::Sin.sup(), Extended::Finite(1.0));
        assert_eq!(Profile::SquareExp.sup(), Extended::PosInf);
        assert_eq!(Profile::SmoothBump { r: 2.0 }.sup(), Extended::Finite(1.0));
        assert_eq!(Profile::Exp { a: 0.3 }.sup(), Extended::PosInf);
        assert_relative_eq!(Profile::TruncatedSin { a: -1.0, b: 1.0 }.sup().finite().unwrap(), 1f64.sin());
        assert_eq!(Profile::TruncatedSin { a: 0.0, b: 2.0 }.sup(), Extended::Finite(1.0));
        assert_eq!(Profile::Sin.scaled(-3.0).sup(), Extended::Finite(3.0));
    }

    #[test]
    fn truncated_sin_is_not_differentiable_at_ends() {
        let p = Profile::TruncatedSin { a: -1.0, b: 1.0 };
        assert_eq!(p.derivative(1.0), Err(Error::NonDifferentiable { xi: 1.0 }));
        assert_eq!(p.derivative(-1.0), Err(Error::NonDifferentiable { xi: -1.0 }));
        assert_relative_eq!(p.derivative(0.5).unwrap(), 0.5f64.cos());
        assert!(!p.is_c1());
    }

    #[test]
    fn bump_plateau_and_support() {
        let p = Profile::SmoothBump { r: 2.0 };
        assert_eq!(p.value(0.0), 1.0);
        assert_eq!(p.value(2.0), 1.0);
        assert_eq!(p.value(3.0), 0.0);
        assert_eq!(p.value(-3.5), 0.0);
        let v = p.value(2.5);
        assert!(v > 0.0 && v < 1.0);
        assert_relative_eq!(v, 0.5, epsilon = 1e-15);
        assert_eq!(p.support(), Support::Interval { lo: -3.0, hi: 3.0 });
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let p = Profile::tabulated(vec![(0.0, 0.0), (1.0, 2.0), (3.0, -2.0)]).unwrap();
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(2.0), 0.0);
        assert_eq!(p.value(3.0), -2.0);
        assert_eq!(p.value(3.5), 0.0);
        assert_eq!(p.derivative(2.0).unwrap(), -2.0);
        assert_eq!(p.sup(), Extended::Finite(2.0));
        assert!(Profile::tabulated(vec![(1.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn signed_log_survives_overflow() {
        let (s, l) = Profile::SquareExp.signed_ln(40.0);
        assert_eq!(s, 1.0);
        assert_eq!(l, 1600.0);
        let (s, l) = Profile::Sin.scaled(-2.0).signed_ln(FRAC_PI_2);
        assert_eq!(s, -1.0);
        assert_relative_eq!(l, 2f64.ln());
        let (s, _) = Profile::Zero.signed_ln(1.0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn exponential_terms_reproduce_values() {
        let profiles = [
            Profile::Sin,
            Profile::Cos.scaled(0.5),
            Profile::Exp { a: -0.3 },
            Profile::sum(vec![Profile::Sin, Profile::Exp { a: 0.2 }]),
        ];
        for p in &profiles {
            let terms = p.exponential_terms().unwrap();
            for xi in [-2.0, -0.3, 0.0, 1.7, 4.0] {
                let v: f64 = terms.iter().map(|t| (t.coeff * (t.rate * xi).exp()).re).sum();
                assert_relative_eq!(v, p.value(xi), epsilon = 1e-14);
            }
        }
        assert!(Profile::SquareExp.exponential_terms().is_none());
    }

    #[test]
    fn json_tagging() {
        let p: Profile = serde_json::from_str(r#"{"type":"exp","a":-0.0125}"#).unwrap();
        assert_eq!(p, Profile::Exp { a: -0.0125 });
        let p: Profile = serde_json::from_str(r#"{"type":"sin"}"#).unwrap();
        assert_eq!(p, Profile::Sin);
        let p: Profile = serde_json::from_str(r#"{"type":"scaled","factor":-1,"profile":{"type":"sin"}}"#).unwrap();
        assert_eq!(p, Profile::Sin.scaled(-1.0));
        assert!(serde_json::from_str::<Profile>(r#"{"type":"exp","a":1,"b":2}"#).is_err());
        assert!(serde_json::from_str::<Profile>(r#"{"type":"sinh"}"#).is_err());
    }
}
