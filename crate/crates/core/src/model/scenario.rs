use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Branch, GasParameters, Profile, WaveMode};
use crate::error::{Error, Result};

/// Time-harmonic source `h(t)·A·sin(ω_f t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Forcing {
    pub omega_f: f64,
}

/// Background gas, four wave modes, four profiles and an optional source
/// frequency. Every evaluator takes one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario", into = "RawScenario")]
pub struct Scenario {
    gas: GasParameters,
    modes: [WaveMode; 4],
    profiles: [Profile; 4],
    forcing: Option<Forcing>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    gas: GasParameters,
    modes: Vec<WaveMode>,
    profiles: Vec<Profile>,
    #[serde(default)]
    forcing: Option<Forcing>,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        let modes: [WaveMode; 4] = raw
            .modes
            .try_into()
            .map_err(|v: Vec<WaveMode>| Error::InvalidParameter(format!("expected 4 modes, got {}", v.len())))?;
        let profiles: [Profile; 4] = raw
            .profiles
            .try_into()
            .map_err(|v: Vec<Profile>| Error::InvalidParameter(format!("expected 4 profiles, got {}", v.len())))?;
        let s = Scenario::new(raw.gas, modes, profiles)?;
        match raw.forcing {
            Some(f) => s.with_forcing(f.omega_f),
            None => Ok(s),
        }
    }
}

impl From<Scenario> for RawScenario {
    fn from(s: Scenario) -> Self {
        RawScenario { gas: s.gas, modes: s.modes.to_vec(), profiles: s.profiles.to_vec(), forcing: s.forcing }
    }
}

impl Scenario {
    pub fn new(gas: GasParameters, modes: [WaveMode; 4], profiles: [Profile; 4]) -> Result<Self> {
        gas.validate()?;
        for (i, m) in modes.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::InvalidParameter(format!("mode {} is not finite", i + 1)));
            }
        }
        if modes[2].k == 0.0 || modes[3].k == 0.0 {
            return Err(Error::Precondition("k3·k4 ≠ 0 is required".into()));
        }
        for p in &profiles {
            p.validate()?;
        }
        Ok(Scenario { gas, modes, profiles, forcing: None })
    }

    /// Only `branch` active with profile `profile`; the remaining branches get
    /// the default modes `(1, 1, 1)` and the zero profile.
    pub fn single_branch(gas: GasParameters, branch: Branch, mode: WaveMode, profile: Profile) -> Result<Self> {
        let mut modes = [WaveMode::new(1.0, 1.0, 1.0); 4];
        modes[branch.index()] = mode;
        let mut profiles = [Profile::Zero, Profile::Zero, Profile::Zero, Profile::Zero];
        profiles[branch.index()] = profile;
        Scenario::new(gas, modes, profiles)
    }

    pub fn with_forcing(mut self, omega_f: f64) -> Result<Self> {
        if !omega_f.is_finite() {
            return Err(Error::InvalidParameter(format!("omega_f must be finite, got {omega_f}")));
        }
        self.forcing = Some(Forcing { omega_f });
        Ok(self)
    }

    pub fn without_forcing(mut self) -> Self {
        self.forcing = None;
        self
    }

    pub fn with_profiles(&self, profiles: [Profile; 4]) -> Result<Self> {
        let mut s = Scenario::new(self.gas, self.modes, profiles)?;
        s.forcing = self.forcing;
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn gas(&self) -> &GasParameters {
        &self.gas
    }

    pub fn modes(&self) -> &[WaveMode; 4] {
        &self.modes
    }

    pub fn mode(&self, branch: Branch) -> &WaveMode {
        &self.modes[branch.index()]
    }

    pub fn profiles(&self) -> &[Profile; 4] {
        &self.profiles
    }

    pub fn profile(&self, branch: Branch) -> &Profile {
        &self.profiles[branch.index()]
    }

    pub fn forcing(&self) -> Option<Forcing> {
        self.forcing
    }

    pub fn omega_f(&self) -> Result<f64> {
        self.forcing.map(|f| f.omega_f).ok_or_else(|| Error::Precondition("scenario has no forcing frequency".into()))
    }

    pub fn active_branches(&self) -> impl Iterator<Item = Branch> + '_ {
        Branch::ALL.into_iter().filter(|b| !self.profile(*b).is_zero())
    }

    /// `(c1, c2, c3, c4)`.
    pub fn characteristic_speeds(&self) -> [f64; 4] {
        Branch::ALL.map(|b| self.mode(b).characteristic_speed(b, &self.gas))
    }

    /// True when every profile is continuously differentiable.
    pub fn is_c1(&self) -> bool {
        self.profiles.iter().all(Profile::is_c1)
    }
}

/// Free-function form of [`Scenario::characteristic_speeds`].
pub fn characteristic_speeds(s: &Scenario) -> [f64; 4] {
    s.characteristic_speeds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference(profiles: [Profile; 4]) -> Scenario {
        Scenario::new(GasParameters::reference_air(), [WaveMode::new(1.0, 1.0, 1.0); 4], profiles).unwrap()
    }

    #[test]
    fn reference_speeds() {
        let s = reference([Profile::Sin, Profile::Zero, Profile::Zero, Profile::Zero]);
        let c = s.characteristic_speeds();
        assert_relative_eq!(c[0], -517.557_528_611_262_7, max_relative = 1e-14);
        assert_relative_eq!(c[1], 677.557_528_611_262_7, max_relative = 1e-14);
        assert_eq!(c[2], 80.0);
        assert_eq!(c[3], 80.0);
    }

    #[test]
    fn vortical_modes_need_nonzero_k() {
        let gas = GasParameters::reference_air();
        let mut modes = [WaveMode::new(1.0, 1.0, 1.0); 4];
        modes[3] = WaveMode::new(0.0, 1.0, 1.0);
        let zero = [Profile::Zero, Profile::Zero, Profile::Zero, Profile::Zero];
        assert!(matches!(Scenario::new(gas, modes, zero), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let text = r#"{
            "gas": {"U0": 80, "rho0": 1.2, "c0": 345, "p0": 142830},
            "modes": [{"k":1,"l":1,"m":1},{"k":1,"l":1,"m":1},{"k":1,"l":1,"m":1},{"k":1,"l":1,"m":1}],
            "profiles": [{"type":"sin"},{"type":"zero"},{"type":"zero"},{"type":"exp","a":-0.0125}],
            "forcing": {"omega_f": -517.5575}
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.omega_f().unwrap(), -517.5575);
        assert_eq!(s.profile(Branch::VorticalZ), &Profile::Exp { a: -0.0125 });
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);

        let extra = text.replace("\"forcing\"", "\"extra\": 1, \"forcing\"");
        assert!(Scenario::from_json(&extra).is_err());
        let three = text.replace(r#"{"type":"sin"},"#, "");
        assert!(Scenario::from_json(&three).is_err());
        let null_forcing = text.replace(r#"{"omega_f": -517.5575}"#, "null");
        assert!(Scenario::from_json(&null_forcing).unwrap().forcing().is_none());
    }
}
