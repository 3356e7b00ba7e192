//! Physical parameters of the sensor and their validation.
//!
//! All rates and frequencies are angular (rad/s) in SI form. The simulation
//! itself runs in internal units where `omega_m1 = 1` and `hbar = 1`; see
//! [`SystemParams::nondimensionalize`].

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact SI value.
pub const K_B: f64 = 1.380_649e-23;

/// How the cavity drive is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Drive {
    /// Drive amplitude `E_L` in rad/s.
    Amplitude(f64),
    /// Input power `P_L` (W) at laser frequency `omega_l` (rad/s).
    Power { power: f64, omega_l: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_m1: f64,
    pub omega_m2: f64,
    pub gamma_m1: f64,
    pub gamma_m2: f64,
    /// Total cavity decay rate.
    pub kappa: f64,
    /// External (coupling-port) decay rate.
    pub kappa_ex: f64,
    /// Single-photon optomechanical coupling.
    pub g0: f64,
    /// Bare cavity-drive detuning `omega_a - omega_L`.
    pub delta_a: f64,
    pub drive: Drive,
    /// OPA pump gain `G`.
    pub gain: f64,
    /// OPA pump phase `theta` (rad).
    pub pump_phase: f64,
    /// Oscillator-oscillator coupling.
    pub lambda: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Homodyne local-oscillator phase `Phi` (rad).
    pub homodyne_phase: f64,
    /// Linearized optomechanical coupling `g`. When `None` it is derived
    /// from the steady state as `sqrt(2) |alpha| g0`.
    pub coupling: Option<f64>,
}

impl SystemParams {
    /// Identical-oscillator parameter set with every rate given as a
    /// multiple of `omega_m` (rad/s). Drive, detuning and phases are zero.
    pub fn identical(omega_m: f64) -> Self {
        SystemParams {
            omega_m1: omega_m,
            omega_m2: omega_m,
            gamma_m1: 1e-5 * omega_m,
            gamma_m2: 1e-5 * omega_m,
            kappa: 100.0 * omega_m,
            kappa_ex: 100.0 * omega_m,
            g0: 1e-4 * omega_m,
            delta_a: 0.0,
            drive: Drive::Amplitude(1e3 * omega_m),
            gain: 0.0,
            pump_phase: 0.0,
            lambda: 0.0,
            temperature: 0.0,
            homodyne_phase: 0.0,
            coupling: None,
        }
    }

    /// Drive amplitude `|E_L|` in the same units as the rates.
    pub fn drive_amplitude(&self) -> f64 {
        match self.drive {
            Drive::Amplitude(e) => e,
            Drive::Power { power, omega_l } => (self.kappa * power / (HBAR * omega_l)).sqrt(),
        }
    }

    /// Bose occupation of both mechanical baths. Requires SI frequencies.
    pub fn thermal_occupancy(&self) -> ThermalOccupancy {
        ThermalOccupancy {
            n_th1: bose_occupation(self.omega_m1, self.temperature),
            n_th2: bose_occupation(self.omega_m2, self.temperature),
        }
    }

    /// High-temperature coefficients `k_B T / (hbar omega_mi)`. Requires SI
    /// frequencies.
    pub fn classical_occupancy(&self) -> ThermalOccupancy {
        let c = |w: f64| K_B * self.temperature / (HBAR * w);
        ThermalOccupancy {
            n_th1: c(self.omega_m1),
            n_th2: c(self.omega_m2),
        }
    }

    /// Rescale every rate by `omega_m1` so that `omega_m1 = 1` internally.
    /// A power-specified drive is resolved to an amplitude first.
    pub fn nondimensionalize(&self) -> Dimensionless {
        let unit = self.omega_m1;
        let s = |x: f64| x / unit;
        Dimensionless {
            params: SystemParams {
                omega_m1: s(self.omega_m1),
                omega_m2: s(self.omega_m2),
                gamma_m1: s(self.gamma_m1),
                gamma_m2: s(self.gamma_m2),
                kappa: s(self.kappa),
                kappa_ex: s(self.kappa_ex),
                g0: s(self.g0),
                delta_a: s(self.delta_a),
                drive: Drive::Amplitude(s(self.drive_amplitude())),
                gain: s(self.gain),
                pump_phase: self.pump_phase,
                lambda: s(self.lambda),
                temperature: self.temperature,
                homodyne_phase: self.homodyne_phase,
                coupling: self.coupling.map(s),
            },
            omega_unit: unit,
        }
    }
}

/// Parameters expressed in units of `omega_unit` (the SI value of `omega_m1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dimensionless {
    pub params: SystemParams,
    pub omega_unit: f64,
}

impl Dimensionless {
    pub fn redimensionalize(&self) -> SystemParams {
        let u = self.omega_unit;
        let p = &self.params;
        let s = |x: f64| x * u;
        SystemParams {
            omega_m1: s(p.omega_m1),
            omega_m2: s(p.omega_m2),
            gamma_m1: s(p.gamma_m1),
            gamma_m2: s(p.gamma_m2),
            kappa: s(p.kappa),
            kappa_ex: s(p.kappa_ex),
            g0: s(p.g0),
            delta_a: s(p.delta_a),
            drive: Drive::Amplitude(s(p.drive_amplitude())),
            gain: s(p.gain),
            pump_phase: p.pump_phase,
            lambda: s(p.lambda),
            temperature: p.temperature,
            homodyne_phase: p.homodyne_phase,
            coupling: p.coupling.map(s),
        }
    }

    /// Thermal occupancy using the SI oscillator frequencies.
    pub fn thermal_occupancy(&self) -> ThermalOccupancy {
        self.redimensionalize().thermal_occupancy()
    }

    pub fn classical_occupancy(&self) -> ThermalOccupancy {
        self.redimensionalize().classical_occupancy()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalOccupancy {
    pub n_th1: f64,
    pub n_th2: f64,
}

/// `1 / (exp(hbar omega / k_B T) - 1)`, zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Soft regime gates: reported, never fatal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Warning {
    /// `G >= kappa/4`: the cavity quadrature is parametrically unstable.
    GainAboveStabilityGate { gain_over_kappa: f64 },
    /// `g0` is not small against `kappa` and `omega_m1`.
    StrongOptomechanicalCoupling { g0: f64, limit: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::GainAboveStabilityGate { gain_over_kappa } => write!(
                f,
                "G/kappa = {gain_over_kappa} exceeds Routh-Hurwitz gate 0.25"
            ),
            Warning::StrongOptomechanicalCoupling { g0, limit } => write!(
                f,
                "g0 = {g0} is not weak (limit {limit}); linearization may fail"
            ),
        }
    }
}

/// Fraction of `min(kappa, omega_m1)` above which `g0` triggers a warning.
pub const WEAK_COUPLING_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validated {
    pub params: SystemParams,
    pub warnings: Vec<Warning>,
}

/// Check hard invariants and collect soft-gate warnings.
pub fn validate(raw: &SystemParams) -> Result<Validated, Vec<ParamError>> {
    let mut errs = Vec::new();
    let p = raw;

    let finite: [(&'static str, f64); 13] = [
        ("omega_m1", p.omega_m1),
        ("omega_m2", p.omega_m2),
        ("gamma_m1", p.gamma_m1),
        ("gamma_m2", p.gamma_m2),
        ("kappa", p.kappa),
        ("kappa_ex", p.kappa_ex),
        ("g0", p.g0),
        ("Delta_a", p.delta_a),
        ("G", p.gain),
        ("theta", p.pump_phase),
        ("lambda", p.lambda),
        ("T", p.temperature),
        ("Phi", p.homodyne_phase),
    ];
    for (field, v) in finite {
        if !v.is_finite() {
            errs.push(ParamError::NotFinite { field });
        }
    }

    for (field, v) in [
        ("omega_m1", p.omega_m1),
        ("omega_m2", p.omega_m2),
        ("gamma_m1", p.gamma_m1),
        ("gamma_m2", p.gamma_m2),
        ("kappa", p.kappa),
        ("kappa_ex", p.kappa_ex),
        ("g0", p.g0),
    ] {
        if v.is_finite() && v <= 0.0 {
            errs.push(ParamError::NonPositiveRate { field, value: v });
        }
    }
    match p.drive {
        Drive::Amplitude(e) => {
            if !e.is_finite() {
                errs.push(ParamError::NotFinite { field: "E_L" });
            } else if e < 0.0 {
                errs.push(ParamError::Negative { field: "E_L", value: e });
            }
        }
        Drive::Power { power, omega_l } => {
            if !power.is_finite() {
                errs.push(ParamError::NotFinite { field: "P_L" });
            } else if power < 0.0 {
                errs.push(ParamError::Negative { field: "P_L", value: power });
            }
            if !omega_l.is_finite() {
                errs.push(ParamError::NotFinite { field: "omega_L" });
            } else if omega_l <= 0.0 {
                errs.push(ParamError::NonPositiveRate { field: "omega_L", value: omega_l });
            }
        }
    }
    for (field, v) in [("lambda", p.lambda), ("G", p.gain), ("T", p.temperature)] {
        if v.is_finite() && v < 0.0 {
            errs.push(ParamError::Negative { field, value: v });
        }
    }
    if let Some(g) = p.coupling {
        if !g.is_finite() {
            errs.push(ParamError::NotFinite { field: "g" });
        } else if g < 0.0 {
            errs.push(ParamError::Negative { field: "g", value: g });
        }
    }

    if p.kappa > 0.0 && p.kappa_ex > 0.0 {
        let ratio = p.kappa_ex / p.kappa;
        if !(ratio > 0.9 && ratio <= 1.0) {
            errs.push(ParamError::Undercoupled { ratio });
        }
    }

    let product = p.omega_m1 * p.omega_m2;
    let lambda_sq = p.lambda * p.lambda;
    if product.is_finite() && lambda_sq.is_finite() && product <= lambda_sq {
        errs.push(ParamError::StaticInstability { product, lambda_sq });
    }

    if !errs.is_empty() {
        return Err(errs);
    }

    let mut warnings = Vec::new();
    if p.gain >= 0.25 * p.kappa {
        warnings.push(Warning::GainAboveStabilityGate {
            gain_over_kappa: p.gain / p.kappa,
        });
    }
    let limit = WEAK_COUPLING_FRACTION * p.kappa.min(p.omega_m1);
    if p.g0 > limit {
        warnings.push(Warning::StrongOptomechanicalCoupling { g0: p.g0, limit });
    }
    Ok(Validated {
        params: *p,
        warnings,
    })
}
