//! Named operating points for the standard figure set.
//!
//! Every preset uses identical oscillators at `omega_m = 2 pi x 1 MHz`,
//! `gamma_m = 1e-5 omega_m`, `kappa = 100 omega_m`, a resonant real mean
//! field (figure detuning mode), `theta = Phi = 0`, and a fixed linearized
//! coupling `g = 1e-3 omega_m`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::model::ModelOptions;
use crate::params::SystemParams;

pub const OMEGA_M: f64 = 2.0 * PI * 1e6;
pub const COUPLING: f64 = 1e-3;
pub const CRYO_T: f64 = 77e-3;
pub const ROOM_T: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: SystemParams,
    pub options: ModelOptions,
}

pub const PRESET_NAMES: [&str; 8] = ["fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"];

/// Shared base with `lambda`, `G` (units of kappa) and `T` filled in.
pub fn base(lambda: f64, gain: f64, temperature: f64) -> SystemParams {
    let mut p = SystemParams::identical(OMEGA_M);
    p.lambda = lambda * OMEGA_M;
    p.gain = gain * p.kappa;
    p.temperature = temperature;
    p.coupling = Some(COUPLING * OMEGA_M);
    p
}

pub fn preset(name: &str) -> Option<Preset> {
    let (summary, params) = match name {
        "fig2" => ("single oscillator at room temperature; homodyne phase scan", base(0.0, 0.0, ROOM_T)),
        "fig3" => ("coupled oscillators, lambda = 0.15 omega_m, no gain", base(0.15, 0.0, CRYO_T)),
        "fig5" => ("coupled oscillators with OPA gain G = 0.2 kappa", base(0.15, 0.2, CRYO_T)),
        "fig6" => ("intracavity photon number versus drive", base(0.15, 0.0, CRYO_T)),
        "fig7" => ("phase-quadrature variance versus gain", base(0.15, 0.0, CRYO_T)),
        "fig8" => ("coupling-strength sweep at omega = 1.07 omega_m", base(0.15, 0.0, CRYO_T)),
        "fig9" => ("joint scheme, lambda = 0.15 omega_m and G = 0.24 kappa", base(0.15, 0.24, CRYO_T)),
        "fig10" => ("normal-mode cross-check operating point", base(0.15, 0.24, CRYO_T)),
        _ => return None,
    };
    let name = PRESET_NAMES.into_iter().find(|n| *n == name)?;
    Some(Preset {
        name,
        summary,
        params,
        options: ModelOptions::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate;

    #[test]
    fn all_presets_validate_cleanly() {
        for n in PRESET_NAMES {
            let p = preset(n).unwrap();
            let v = validate(&p.params).unwrap();
            assert!(v.warnings.is_empty(), "{n}: {:?}", v.warnings);
        }
        assert!(preset("fig4").is_none());
    }

    #[test]
    fn fig3_values() {
        let p = preset("fig3").unwrap().params;
        assert_eq!(p.lambda / p.omega_m1, 0.15);
        assert_eq!(p.kappa / p.omega_m1, 100.0);
        assert_eq!(p.gamma_m1 / p.omega_m1, 1e-5);
        assert_eq!(p.temperature, 77e-3);
    }
}
