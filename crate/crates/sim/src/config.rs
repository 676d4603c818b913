//! Run configuration: a `key = value` file, command-line overrides and the
//! resolved physical parameters.
//!
//! The file is a flat TOML table of numbers, so `# comments` and
//! `key = 1e-20` both work. Recognized keys are listed in [`KNOWN_KEYS`];
//! anything else is rejected so typos do not go unnoticed.

use crate::error::{Result, SimError};
use quasi_landau_core::units::{PhysParams, MASS_K40};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const KNOWN_KEYS: [&str; 6] = ["mass_kg", "alpha", "gamma", "beta_soc", "temperature_K", "vx"];

/// Unit system for all inputs and outputs of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// SI with CODATA constants.
    Si,
    /// `ħ = m = k_B = 1`; by default `α γ = ½` so `ω_c(kx = 1) = 1`.
    Natural,
}

/// Parse the text of a configuration file.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, f64>> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| SimError::config(format!("malformed config: {}", e.message())))?;
    let mut out = BTreeMap::new();
    for (key, value) in table {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(SimError::config(format!(
                "unknown config key `{key}` (known keys: {})",
                KNOWN_KEYS.join(", ")
            )));
        }
        let v = match value {
            toml::Value::Float(f) => f,
            toml::Value::Integer(i) => i as f64,
            other => return Err(SimError::config(format!("config key `{key}` must be a number, got {other}"))),
        };
        out.insert(key, v);
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Physical inputs, each optional; flags are layered over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhysInputs {
    pub mass_kg: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub beta_soc: Option<f64>,
    pub temperature_k: Option<f64>,
    pub vx: Option<f64>,
}

impl PhysInputs {
    pub fn from_map(map: &BTreeMap<String, f64>) -> Self {
        let get = |k: &str| map.get(k).copied();
        PhysInputs {
            mass_kg: get("mass_kg"),
            alpha: get("alpha"),
            gamma: get("gamma"),
            beta_soc: get("beta_soc"),
            temperature_k: get("temperature_K"),
            vx: get("vx"),
        }
    }

    /// `self` with every value present in `over` replaced.
    pub fn overridden_by(self, over: PhysInputs) -> Self {
        PhysInputs {
            mass_kg: over.mass_kg.or(self.mass_kg),
            alpha: over.alpha.or(self.alpha),
            gamma: over.gamma.or(self.gamma),
            beta_soc: over.beta_soc.or(self.beta_soc),
            temperature_k: over.temperature_k.or(self.temperature_k),
            vx: over.vx.or(self.vx),
        }
    }
}

/// Fully resolved physical setup of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved {
    pub units: Units,
    pub mass: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub beta_soc: Option<f64>,
    pub hbar: f64,
    pub k_b: f64,
    pub ev: f64,
    pub vx: Option<f64>,
    pub temperature: Option<f64>,
}

impl Resolved {
    pub fn resolve(units: Units, inputs: PhysInputs) -> Result<Self> {
        let base = match units {
            Units::Si => PhysParams::si(MASS_K40, 3.6e-16, 1e10),
            Units::Natural => PhysParams::oscillator_units(1.0),
        };
        let vx_default = match units {
            Units::Si => None,
            Units::Natural => Some(1.0),
        };
        let r = Resolved {
            units,
            mass: inputs.mass_kg.unwrap_or(base.mass),
            alpha: inputs.alpha.unwrap_or(base.alpha),
            gamma: inputs.gamma.unwrap_or(base.gamma),
            beta_soc: inputs.beta_soc,
            hbar: base.hbar,
            k_b: base.k_b,
            ev: base.ev,
            vx: inputs.vx.or(vx_default),
            temperature: inputs.temperature_k,
        };
        r.params()
            .validate()
            .map_err(|e| SimError::config(e.to_string()))?;
        for (key, v) in [("vx", r.vx), ("temperature_K", r.temperature)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(SimError::config(format!("`{key}` must be positive, got {v}")));
                }
            }
        }
        Ok(r)
    }

    pub fn params(&self) -> PhysParams {
        PhysParams {
            mass: self.mass,
            alpha: self.alpha,
            gamma: self.gamma,
            hbar: self.hbar,
            k_b: self.k_b,
            ev: self.ev,
            beta_override: self.beta_soc,
        }
    }

    pub fn require_vx(&self) -> Result<f64> {
        self.vx.ok_or_else(|| SimError::config("missing required key `vx` (config file or --vx)"))
    }

    pub fn require_temperature(&self) -> Result<f64> {
        self.temperature
            .ok_or_else(|| SimError::config("missing required key `temperature_K` (config file or --temperature)"))
    }

    /// `kx = m vx / ħ`.
    pub fn reference_kx(&self) -> Result<f64> {
        Ok(self.mass * self.require_vx()? / self.hbar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_numbers() {
        let map = parse_config("# estimate\nalpha = 3.6e-16 # inline\ngamma = 1e10\nvx = 1\n").unwrap();
        assert_eq!(map["alpha"], 3.6e-16);
        assert_eq!(map["gamma"], 1e10);
        assert_eq!(map["vx"], 1.0);
    }

    #[test]
    fn rejects_unknown_and_non_numeric() {
        let e = parse_config("alhpa = 1").unwrap_err().to_string();
        assert!(e.contains("alhpa"));
        assert!(parse_config("vx = \"fast\"").is_err());
        assert!(parse_config("vx 0.1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = PhysInputs::from_map(&parse_config("vx = 0.1\nalpha = 2").unwrap());
        let flags = PhysInputs { vx: Some(0.2), ..Default::default() };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.vx, Some(0.2));
        assert_eq!(merged.alpha, Some(2.0));
    }

    #[test]
    fn resolution_defaults_and_checks() {
        let si = Resolved::resolve(Units::Si, PhysInputs::default()).unwrap();
        assert_eq!(si.mass, MASS_K40);
        assert!(si.require_vx().unwrap_err().to_string().contains("vx"));
        let nat = Resolved::resolve(Units::Natural, PhysInputs::default()).unwrap();
        assert_eq!(nat.reference_kx().unwrap(), 1.0);
        let bad = PhysInputs { mass_kg: Some(-1.0), ..Default::default() };
        assert!(matches!(Resolved::resolve(Units::Si, bad), Err(SimError::Config(_))));
        let bad = PhysInputs { vx: Some(0.0), ..Default::default() };
        assert!(Resolved::resolve(Units::Si, bad).is_err());
    }
}
