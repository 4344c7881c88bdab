use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CONSISTENCY_TOL: f64 = 1e-10;

/// Uniform background state the equations are linearized about.
///
/// `p0`, `t0`, `r`, `cp` and `cv` are optional; when supplied they must be
/// consistent with `c0² = p0/ρ0 = R·T0` and `R = cp − cv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGas", into = "RawGas")]
pub struct GasParameters {
    u0: f64,
    rho0: f64,
    c0: f64,
    p0: Option<f64>,
    t0: Option<f64>,
    r: Option<f64>,
    cp: Option<f64>,
    cv: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGas {
    #[serde(rename = "U0")]
    u0: f64,
    rho0: f64,
    c0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p0: Option<f64>,
    #[serde(rename = "T0", default, skip_serializing_if = "Option::is_none")]
    t0: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cv: Option<f64>,
}

impl TryFrom<RawGas> for GasParameters {
    type Error = Error;

    fn try_from(raw: RawGas) -> Result<Self> {
        let gas = GasParameters {
            u0: raw.u0,
            rho0: raw.rho0,
            c0: raw.c0,
            p0: raw.p0,
            t0: raw.t0,
            r: raw.r,
            cp: raw.cp,
            cv: raw.cv,
        };
        gas.validate()?;
        Ok(gas)
    }
}

impl From<GasParameters> for RawGas {
    fn from(g: GasParameters) -> Self {
        RawGas { u0: g.u0, rho0: g.rho0, c0: g.c0, p0: g.p0, t0: g.t0, r: g.r, cp: g.cp, cv: g.cv }
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_TOL * a.abs().max(b.abs())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl GasParameters {
    pub fn new(u0: f64, rho0: f64, c0: f64) -> Result<Self> {
        let gas = GasParameters { u0, rho0, c0, p0: None, t0: None, r: None, cp: None, cv: None };
        gas.validate()?;
        Ok(gas)
    }

    /// Mean flow of 80 m/s in air at c0 = 345 m/s, ρ0 = 1.2 kg/m³.
    pub fn reference_air() -> Self {
        GasParameters::new(80.0, 1.2, 345.0).expect("reference parameters are valid")
    }

    pub fn with_pressure(mut self, p0: f64) -> Result<Self> {
        self.p0 = Some(p0);
        self.validate()?;
        Ok(self)
    }

    pub fn with_thermodynamics(mut self, t0: f64, r: f64, cp: f64, cv: f64) -> Result<Self> {
        self.t0 = Some(t0);
        self.r = Some(r);
        self.cp = Some(cp);
        self.cv = Some(cv);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("U0", self.u0)?;
        positive("rho0", self.rho0)?;
        positive("c0", self.c0)?;
        for (name, v) in [("p0", self.p0), ("T0", self.t0), ("R", self.r), ("cp", self.cp), ("cv", self.cv)] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        let c2 = self.c0 * self.c0;
        if let Some(p0) = self.p0 {
            if !rel_close(c2, p0 / self.rho0) {
                return Err(Error::InvalidParameter(format!(
                    "c0^2 = {c2} is inconsistent with p0/rho0 = {}",
                    p0 / self.rho0
                )));
            }
        }
        if let (Some(r), Some(t0)) = (self.r, self.t0) {
            if !rel_close(c2, r * t0) {
                return Err(Error::InvalidParameter(format!("c0^2 = {c2} is inconsistent with R*T0 = {}", r * t0)));
            }
        }
        if let (Some(r), Some(cp), Some(cv)) = (self.r, self.cp, self.cv) {
            if !rel_close(r, cp - cv) {
                return Err(Error::InvalidParameter(format!("R = {r} is inconsistent with cp - cv = {}", cp - cv)));
            }
        }
        Ok(())
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Background pressure; `ρ0·c0²` when not supplied.
    pub fn p0(&self) -> f64 {
        self.p0.unwrap_or(self.rho0 * self.c0 * self.c0)
    }

    pub fn t0(&self) -> Option<f64> {
        self.t0
    }

    pub fn gas_constant(&self) -> Option<f64> {
        self.r
    }

    /// Acoustic impedance `c0·ρ0`.
    pub fn impedance(&self) -> f64 {
        self.c0 * self.rho0
    }
}
