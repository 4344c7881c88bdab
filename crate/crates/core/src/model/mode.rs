use serde::{Deserialize, Serialize};

use super::GasParameters;

/// The four solution families of the explicit plane-wave representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Acoustic wave travelling at `kU0 − c0‖α‖`.
    AcousticSlow,
    /// Acoustic wave travelling at `kU0 + c0‖α‖`.
    AcousticFast,
    /// Convected vortical mode coupling v_x and v_y.
    VorticalY,
    /// Convected vortical mode coupling v_x and v_z.
    VorticalZ,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::AcousticSlow, Branch::AcousticFast, Branch::VorticalY, Branch::VorticalZ];

    /// Zero-based position in a scenario.
    pub fn index(self) -> usize {
        match self {
            Branch::AcousticSlow => 0,
            Branch::AcousticFast => 1,
            Branch::VorticalY => 2,
            Branch::VorticalZ => 3,
        }
    }

    /// One-based label matching `f1..f4`.
    pub fn number(self) -> usize {
        self.index() + 1
    }
}

/// Wavenumber triple `(k, l, m)` of one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveMode {
    pub k: f64,
    pub l: f64,
    pub m: f64,
}

impl WaveMode {
    pub const fn new(k: f64, l: f64, m: f64) -> Self {
        WaveMode { k, l, m }
    }

    pub fn wavenorm(&self) -> f64 {
        (self.k * self.k + self.l * self.l + self.m * self.m).sqrt()
    }

    /// Phase `k·x + l·y + m·z`.
    pub fn phase(&self, x: f64, y: f64, z: f64) -> f64 {
        self.k * x + self.l * y + self.m * z
    }

    pub fn negated(&self) -> Self {
        WaveMode::new(-self.k, -self.l, -self.m)
    }

    /// Coefficient of `t` in the argument of `f_i` for this branch.
    pub fn characteristic_speed(&self, branch: Branch, gas: &GasParameters) -> f64 {
        let convected = self.k * gas.u0();
        match branch {
            Branch::AcousticSlow => convected - gas.c0() * self.wavenorm(),
            Branch::AcousticFast => convected + gas.c0() * self.wavenorm(),
            Branch::VorticalY | Branch::VorticalZ => convected,
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.k.is_finite() && self.l.is_finite() && self.m.is_finite()
    }
}
