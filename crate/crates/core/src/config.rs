//! Flat key-value configuration (TOML) and `key=value` overrides.
//!
//! Keys use SI units and the names `omega_m1 omega_m2 gamma_m1 gamma_m2
//! kappa kappa_ex g0 Delta_a E_L P_L omega_L G theta lambda T Phi g`, plus
//! `figure_mode` (bool) and `thermal_convention` (`classical` | `quantum`).
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelOptions;
use crate::params::{Drive, SystemParams};
use crate::spectrum::ThermalConvention;
use crate::steady::DetuningMode;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_ex: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(rename = "Delta_a", skip_serializing_if = "Option::is_none")]
    pub delta_a: Option<f64>,
    #[serde(rename = "E_L", skip_serializing_if = "Option::is_none")]
    pub e_l: Option<f64>,
    #[serde(rename = "P_L", skip_serializing_if = "Option::is_none")]
    pub p_l: Option<f64>,
    #[serde(rename = "omega_L", skip_serializing_if = "Option::is_none")]
    pub omega_l: Option<f64>,
    #[serde(rename = "G", skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(rename = "Phi", skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure_mode: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal_convention: Option<ThermalConvention>,
}

/// Parameters plus evaluation options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub params: SystemParams,
    pub options: ModelOptions,
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
}

/// Parse one `key=value` override. Numbers, `true`/`false` and bare words
/// are accepted.
pub fn parse_override(s: &str) -> Result<ConfigFile> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{s}` is not key=value")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() || value.is_empty() {
        return Err(Error::Config(format!("override `{s}` is not key=value")));
    }
    let v = if let Ok(x) = value.parse::<f64>() {
        toml::Value::Float(x)
    } else if let Ok(b) = value.parse::<bool>() {
        toml::Value::Boolean(b)
    } else {
        toml::Value::String(value.to_string())
    };
    let mut t = toml::Table::new();
    t.insert(key.to_string(), v);
    toml::Value::Table(t)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("override `{s}`: {}", e.message())))
}

impl ConfigFile {
    /// Layer `self` on top of `base`; fields left unset keep their value.
    pub fn apply(&self, base: Settings) -> Result<Settings> {
        let mut p = base.params;
        let mut o = base.options;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut p.omega_m1, self.omega_m1);
        set(&mut p.omega_m2, self.omega_m2);
        set(&mut p.gamma_m1, self.gamma_m1);
        set(&mut p.gamma_m2, self.gamma_m2);
        set(&mut p.kappa, self.kappa);
        set(&mut p.kappa_ex, self.kappa_ex);
        set(&mut p.g0, self.g0);
        set(&mut p.delta_a, self.delta_a);
        set(&mut p.gain, self.gain);
        set(&mut p.pump_phase, self.theta);
        set(&mut p.lambda, self.lambda);
        set(&mut p.temperature, self.temperature);
        set(&mut p.homodyne_phase, self.phi);
        if self.g.is_some() {
            p.coupling = self.g;
        }

        // a direct amplitude wins over power
        if let Some(e) = self.e_l {
            p.drive = Drive::Amplitude(e);
        } else if self.p_l.is_some() || self.omega_l.is_some() {
            let omega_l = match (self.omega_l, p.drive) {
                (Some(w), _) => w,
                (None, Drive::Power { omega_l, .. }) => omega_l,
                (None, Drive::Amplitude(_)) => {
                    return Err(Error::Config("P_L requires omega_L".into()));
                }
            };
            let power = match (self.p_l, p.drive) {
                (Some(pw), _) => pw,
                (None, Drive::Power { power, .. }) => power,
                (None, Drive::Amplitude(_)) => {
                    return Err(Error::Config("omega_L requires P_L".into()));
                }
            };
            p.drive = Drive::Power { power, omega_l };
        }

        if let Some(f) = self.figure_mode {
            o.detuning = if f { DetuningMode::Figure } else { DetuningMode::SelfConsistent };
        }
        if let Some(t) = self.thermal_convention {
            o.thermal = t;
        }
        Ok(Settings { params: p, options: o })
    }

    /// Every key filled in from resolved settings.
    pub fn resolved(s: &Settings) -> ConfigFile {
        let p = &s.params;
        let (e_l, p_l, omega_l) = match p.drive {
            Drive::Amplitude(e) => (Some(e), None, None),
            Drive::Power { power, omega_l } => (None, Some(power), Some(omega_l)),
        };
        ConfigFile {
            omega_m1: Some(p.omega_m1),
            omega_m2: Some(p.omega_m2),
            gamma_m1: Some(p.gamma_m1),
            gamma_m2: Some(p.gamma_m2),
            kappa: Some(p.kappa),
            kappa_ex: Some(p.kappa_ex),
            g0: Some(p.g0),
            delta_a: Some(p.delta_a),
            e_l,
            p_l,
            omega_l,
            gain: Some(p.gain),
            theta: Some(p.pump_phase),
            lambda: Some(p.lambda),
            temperature: Some(p.temperature),
            phi: Some(p.homodyne_phase),
            g: p.coupling,
            figure_mode: Some(s.options.detuning == DetuningMode::Figure),
            thermal_convention: Some(s.options.thermal),
        }
    }
}
