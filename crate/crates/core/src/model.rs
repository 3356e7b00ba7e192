//! A validated, nondimensionalized operating point with its steady state.

use serde::Serialize;

use crate::dynamics::{build_drift, DriftModel};
use crate::error::{Error, Result};
use crate::params::{validate, SystemParams, ThermalOccupancy, Warning};
use crate::spectrum::ThermalConvention;
use crate::steady::{solve, DetuningMode, SteadyState};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ModelOptions {
    pub detuning: DetuningMode,
    pub thermal: ThermalConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Model {
    /// Parameters in internal units (`omega_m1 = 1`).
    pub params: SystemParams,
    /// SI value of `omega_m1` (rad/s).
    pub omega_unit: f64,
    pub steady: SteadyState,
    /// Bose occupancies of the two baths.
    pub occupancy: ThermalOccupancy,
    /// Coefficients multiplying the two thermal channels of the PSD.
    pub thermal_weights: ThermalOccupancy,
    pub options: ModelOptions,
    pub warnings: Vec<Warning>,
}

impl Model {
    /// Validate SI parameters, rescale them and solve the steady state.
    pub fn new(raw: &SystemParams, options: ModelOptions) -> Result<Model> {
        let validated = validate(raw).map_err(Error::InvalidParams)?;
        let dimless = validated.params.nondimensionalize();
        let steady = solve(&dimless.params, options.detuning)?;
        let occupancy = dimless.thermal_occupancy();
        let thermal_weights = match options.thermal {
            ThermalConvention::Classical => dimless.classical_occupancy(),
            ThermalConvention::Quantum => ThermalOccupancy {
                n_th1: occupancy.n_th1 + 0.5,
                n_th2: occupancy.n_th2 + 0.5,
            },
        };
        Ok(Model {
            params: dimless.params,
            omega_unit: dimless.omega_unit,
            steady,
            occupancy,
            thermal_weights,
            options,
            warnings: validated.warnings,
        })
    }

    pub fn drift(&self) -> DriftModel {
        build_drift(&self.params, &self.steady, self.occupancy)
    }

    /// Same operating point read out at a different homodyne phase.
    pub fn with_homodyne_phase(&self, phi: f64) -> Model {
        let mut m = self.clone();
        m.params.homodyne_phase = phi;
        m
    }
}
