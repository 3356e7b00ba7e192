//! Linearized fluctuation dynamics: drift matrix, stability and steady-state
//! covariances.
//!
//! State order is `[dX1, dP1, dX2, dP2, dx_a, dp_a]`.

pub mod lyapunov;

use nalgebra::{DMatrix, Matrix6};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{SystemParams, ThermalOccupancy};
use crate::steady::SteadyState;

pub const X1: usize = 0;
pub const P1: usize = 1;
pub const X2: usize = 2;
pub const P2: usize = 3;
pub const XA: usize = 4;
pub const PA: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    /// Drift matrix `B` of `m' = B m + c`.
    pub b: Matrix6<f64>,
    /// Symmetrized diffusion matrix of the input noise vector `c`.
    pub d: Matrix6<f64>,
}

/// Cavity-block entries `(l1, l1', l2, l2')`.
pub fn cavity_entries(p: &SystemParams, delta_eff: f64) -> (f64, f64, f64, f64) {
    let (s, c) = p.pump_phase.sin_cos();
    let g = p.gain;
    let k = p.kappa;
    (
        2.0 * g * c - k / 2.0,
        -2.0 * g * c - k / 2.0,
        2.0 * g * s + delta_eff,
        2.0 * g * s - delta_eff,
    )
}

/// Build drift and diffusion from parameters in internal units.
///
/// `occupancy` holds the Bose occupations of the two baths; the mechanical
/// diffusion uses the symmetrized `2 gamma (n + 1/2)`.
pub fn build_drift(p: &SystemParams, s: &SteadyState, occupancy: ThermalOccupancy) -> DriftModel {
    let (l1, l1p, l2, l2p) = cavity_entries(p, s.delta_eff);
    let g = s.g_lin;
    let (sp, cp) = s.phi.sin_cos();
    let mut b = Matrix6::<f64>::zeros();
    b[(X1, P1)] = p.omega_m1;
    b[(P1, X1)] = -p.omega_m1;
    b[(P1, P1)] = -p.gamma_m1;
    b[(P1, X2)] = -p.lambda;
    b[(P1, XA)] = -g * cp;
    b[(P1, PA)] = -g * sp;
    b[(X2, P2)] = p.omega_m2;
    b[(P2, X1)] = -p.lambda;
    b[(P2, X2)] = -p.omega_m2;
    b[(P2, P2)] = -p.gamma_m2;
    b[(XA, X1)] = g * sp;
    b[(XA, XA)] = l1;
    b[(XA, PA)] = l2;
    b[(PA, X1)] = -g * cp;
    b[(PA, XA)] = l2p;
    b[(PA, PA)] = l1p;

    let mut d = Matrix6::<f64>::zeros();
    d[(P1, P1)] = 2.0 * p.gamma_m1 * (occupancy.n_th1 + 0.5);
    d[(P2, P2)] = 2.0 * p.gamma_m2 * (occupancy.n_th2 + 0.5);
    d[(XA, XA)] = p.kappa / 2.0;
    d[(PA, PA)] = p.kappa / 2.0;
    DriftModel { b, d }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub max_real_eigenvalue: f64,
    /// `-max_real_eigenvalue`; positive when stable.
    pub margin: f64,
    pub eigenvalues: Vec<Complex64>,
}

impl DriftModel {
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let m = DMatrix::from_iterator(6, 6, self.b.iter().copied());
        let schur = m.try_schur(f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
        Ok(schur.complex_eigenvalues().iter().copied().collect())
    }

    /// Stable iff every eigenvalue of `B` has negative real part.
    pub fn is_stable(&self) -> Result<StabilityReport> {
        let eigenvalues = self.eigenvalues()?;
        let max_real = eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(StabilityReport {
            stable: max_real < 0.0,
            max_real_eigenvalue: max_real,
            margin: -max_real,
            eigenvalues,
        })
    }

    /// Steady-state symmetrized covariance `V` with `B V + V B^T + D = 0`.
    pub fn steady_covariance(&self) -> Result<CovarianceResult> {
        let report = self.is_stable()?;
        if !report.stable {
            return Err(Error::UnstableSystem {
                max_real: report.max_real_eigenvalue,
            });
        }
        let b = DMatrix::from_iterator(6, 6, self.b.iter().copied());
        let d = DMatrix::from_iterator(6, 6, self.d.iter().copied());
        let v = lyapunov::solve_continuous_lyapunov(&b, &d)?;
        let v = Matrix6::from_iterator(v.iter().copied());
        let res = self.b * v + v * self.b.transpose() + self.d;
        let residual = res.norm() / self.d.norm();
        if !residual.is_finite() {
            return Err(Error::SolverFailure("non-finite covariance"));
        }
        Ok(CovarianceResult {
            v,
            var_xa: v[(XA, XA)],
            var_pa: v[(PA, PA)],
            residual,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceResult {
    pub v: Matrix6<f64>,
    pub var_xa: f64,
    pub var_pa: f64,
    /// `||B V + V B^T + D|| / ||D||` (Frobenius).
    pub residual: f64,
}
