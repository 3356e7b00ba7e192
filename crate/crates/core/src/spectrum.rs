//! Force-referred homodyne noise spectral density.
//!
//! Two independent paths compute the same quantity: the closed-form
//! transfer chain ([`noise_psd`]) and a direct solve of the linear
//! Langevin system in the frequency domain ([`psd_oracle`]). Frequencies are
//! in units of `omega_m1` throughout.

use nalgebra::{Matrix6, Matrix6x4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{P1, P2, PA, XA};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::params::{SystemParams, ThermalOccupancy};
use crate::steady::SteadyState;

/// Denominators below this magnitude are reported as poles.
pub const POLE_TOL: f64 = 1e-14;
/// Signal-transfer magnitude below which the homodyne angle is degenerate.
pub const DEGENERATE_TOL: f64 = 1e-300;

/// Coefficient of the two thermal channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalConvention {
    /// High-temperature `k_B T / (hbar omega_mi)`.
    #[default]
    Classical,
    /// Symmetrized Bose weight `n_th + 1/2`.
    Quantum,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Mechanical susceptibility `omega_m / (omega_m^2 - omega^2 - i omega gamma)`.
pub fn susceptibility(omega_m: f64, gamma: f64, omega: f64) -> Complex64 {
    c(omega_m) / Complex64::new(omega_m * omega_m - omega * omega, -omega * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferChain {
    pub omega: f64,
    pub kappa: f64,
    pub chi_m1: Complex64,
    pub chi_m2: Complex64,
    pub chi_m1_eff: Complex64,
    /// Dressed amplitude response `chi'_a`.
    pub chi_a: Complex64,
    /// Dressed phase response `p'_a`.
    pub p_a: Complex64,
    pub k1: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
    pub k4: Complex64,
    pub k5: Complex64,
    pub k6: Complex64,
    pub chi_aeff: Complex64,
    pub k1p: Complex64,
    pub k2p: Complex64,
    pub k3p: Complex64,
    pub k4p: Complex64,
}

fn checked_inv(den: Complex64, omega: f64, what: &'static str) -> Result<Complex64> {
    if den.norm() < POLE_TOL || !den.is_finite() {
        return Err(Error::PoleHit { omega, what });
    }
    Ok(den.inv())
}

impl TransferChain {
    pub fn new(omega: f64, p: &SystemParams, s: &SteadyState) -> Result<TransferChain> {
        let g = s.g_lin;
        let (sp, cp) = s.phi.sin_cos();
        let (st, ct) = p.pump_phase.sin_cos();
        let gain = p.gain;
        let kappa = p.kappa;

        let chi_m1 = susceptibility(p.omega_m1, p.gamma_m1, omega);
        let chi_m2 = susceptibility(p.omega_m2, p.gamma_m2, omega);
        let lam = p.lambda;
        let chi_m1_eff = chi_m1
            * checked_inv(c(1.0) - lam * lam * chi_m1 * chi_m2, omega, "1 - lambda^2 chi_m1 chi_m2")?;

        let cross = g * g * sp * cp * chi_m1_eff;
        let chi_a = checked_inv(-I * omega + kappa / 2.0 - 2.0 * gain * ct + cross, omega, "chi'_a")?;
        let p_a = checked_inv(-I * omega + kappa / 2.0 + 2.0 * gain * ct - cross, omega, "p'_a")?;

        let r1 = (2.0 * p.gamma_m1).sqrt();
        let r2 = (2.0 * p.gamma_m2).sqrt();
        let k1 = c(2.0 * gain * st + s.delta_eff) - g * g * sp * sp * chi_m1_eff;
        let k2 = -chi_m1_eff * g * sp * lam * chi_m2 * r2;
        let k3 = g * sp * chi_m1_eff * r1;
        let k4 = c(2.0 * gain * st - s.delta_eff) + g * g * cp * cp * chi_m1_eff;
        let k5 = chi_m1_eff * g * cp * lam * chi_m2 * r2;
        let k6 = -g * cp * chi_m1_eff * r1;

        let zero = Complex64::default();
        TransferChain {
            omega,
            kappa,
            chi_m1,
            chi_m2,
            chi_m1_eff,
            chi_a,
            p_a,
            k1,
            k2,
            k3,
            k4,
            k5,
            k6,
            chi_aeff: zero,
            k1p: zero,
            k2p: zero,
            k3p: zero,
            k4p: zero,
        }
        .with_outputs()
    }

    /// Recompute `chi_aeff` and the output coefficients from `chi_a`, `p_a`
    /// and `k1..k6`.
    pub fn with_outputs(mut self) -> Result<TransferChain> {
        let (ca, pa) = (self.chi_a, self.p_a);
        let (k1, k2, k3, k4, k5, k6) = (self.k1, self.k2, self.k3, self.k4, self.k5, self.k6);
        self.chi_aeff =
            self.kappa.sqrt() * checked_inv(c(1.0) - ca * k1 * pa * k4, self.omega, "1 - chi'_a k1 p'_a k4")?;
        self.k1p = ca * k1 * pa * k5 + ca * k2;
        self.k2p = ca * k1 * pa * k6 + ca * k3;
        self.k3p = ca * k2 * pa * k4 + pa * k5;
        self.k4p = ca * k3 * pa * k4 + pa * k6;
        Ok(self)
    }

    /// Assemble the four-term spectrum at homodyne phase `phi`.
    pub fn psd(&self, phi: f64, weights: ThermalOccupancy) -> Result<SpectrumPoint> {
        let (s, co) = phi.sin_cos();
        let sk = self.kappa.sqrt();
        let (ca, pa) = (self.chi_a, self.p_a);
        let dn = (self.k4p + self.k3p) * co - (self.k2p + self.k1p) * s;
        if !(dn.norm() >= DEGENERATE_TOL) {
            return Err(Error::DegenerateDenominator { omega: self.omega });
        }
        let n1 = self.k4p * co - self.k2p * s;
        let n2 = self.k3p * co - self.k1p * s;
        let inv_eff = self.chi_aeff.inv();
        let nx = ca * self.k4 * pa * sk * co - (sk * ca - inv_eff) * s;
        let np = (sk * pa - inv_eff) * co - ca * self.k1 * pa * sk * s;
        Ok(SpectrumPoint::from_channels(
            self.omega,
            [n1 / dn, n2 / dn, nx / dn, np / dn],
            weights,
        ))
    }
}

/// Spectrum at one frequency with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    /// Frequency in units of `omega_m1`.
    pub omega: f64,
    pub total: f64,
    pub th1: f64,
    pub th2: f64,
    /// Radiation-pressure (amplitude-quadrature input) channel.
    pub ba: f64,
    /// Imprecision (phase-quadrature input) channel.
    pub shot: f64,
}

impl SpectrumPoint {
    /// From normalized channel transfers `[f_th1, f_th2, x_in, p_in]`.
    fn from_channels(omega: f64, h: [Complex64; 4], w: ThermalOccupancy) -> SpectrumPoint {
        let th1 = w.n_th1 * h[0].norm_sqr();
        let th2 = w.n_th2 * h[1].norm_sqr();
        let ba = 0.5 * h[2].norm_sqr();
        let shot = 0.5 * h[3].norm_sqr();
        SpectrumPoint {
            omega,
            total: th1 + th2 + ba + shot,
            th1,
            th2,
            ba,
            shot,
        }
    }
}

pub fn transfer_chain(omega: f64, model: &Model) -> Result<TransferChain> {
    TransferChain::new(omega, &model.params, &model.steady)
}

/// Closed-form PSD at `omega` (units of `omega_m1`).
pub fn noise_psd(omega: f64, model: &Model) -> Result<SpectrumPoint> {
    transfer_chain(omega, model)?.psd(model.params.homodyne_phase, model.thermal_weights)
}

/// PSD from `m = (-i omega - B)^-1 c`, one unit input channel at a time.
pub fn psd_oracle(omega: f64, model: &Model) -> Result<SpectrumPoint> {
    let p = &model.params;
    let b = model.drift().b.map(c);
    let m = Matrix6::<Complex64>::identity() * (-I * omega) - b;
    let sk = p.kappa.sqrt();
    let mut cols = Matrix6x4::<Complex64>::zeros();
    cols[(P1, 0)] = c((2.0 * p.gamma_m1).sqrt());
    cols[(P2, 1)] = c((2.0 * p.gamma_m2).sqrt());
    cols[(XA, 2)] = c(sk);
    cols[(PA, 3)] = c(sk);
    let sol = m
        .lu()
        .solve(&cols)
        .filter(|x| x.iter().all(|z| z.is_finite()))
        .ok_or(Error::SingularResolvent { omega })?;

    let (s, co) = p.homodyne_phase.sin_cos();
    let mut h = [Complex64::default(); 4];
    for (j, hj) in h.iter_mut().enumerate() {
        *hj = co * sk * sol[(PA, j)] - s * sk * sol[(XA, j)];
    }
    // direct reflection of the input field
    h[2] += s;
    h[3] -= co;
    let signal = h[0] + h[1];
    if !(signal.norm() >= DEGENERATE_TOL) {
        return Err(Error::DegenerateDenominator { omega });
    }
    Ok(SpectrumPoint::from_channels(
        omega,
        h.map(|x| x / signal),
        model.thermal_weights,
    ))
}

/// Evaluate `f` on every grid point in parallel; errors stay per point.
pub fn sweep_with<F>(grid: &[f64], f: F) -> Vec<(f64, Result<SpectrumPoint>)>
where
    F: Fn(f64) -> Result<SpectrumPoint> + Sync,
{
    grid.par_iter().map(|&w| (w, f(w))).collect()
}

pub fn psd_sweep(grid: &[f64], model: &Model) -> Vec<(f64, Result<SpectrumPoint>)> {
    sweep_with(grid, |w| noise_psd(w, model))
}

/// Default frequency window and density for spectra.
pub const DEFAULT_GRID: (f64, f64, usize) = (0.8, 1.3, 2001);
pub const REFINE_FACTOR: usize = 10;

/// `coarse` plus `REFINE_FACTOR` times denser sampling of the two cells
/// around each local minimum of `total` found on it. The result is sorted
/// and deduplicated.
pub fn refined_grid(model: &Model, coarse: &[f64]) -> Vec<f64> {
    let n = coarse.len();
    let pts = psd_sweep(coarse, model);
    let mut out = coarse.to_vec();
    for i in crate::sweep::local_minima(&values(&pts)) {
        for (lo, hi) in [(coarse[i - 1], coarse[i]), (coarse[i], coarse[(i + 1).min(n - 1)])] {
            out.extend(crate::sweep::linspace(lo, hi, REFINE_FACTOR + 1));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1.0));
    out
}

/// `total` column with failed points as NaN.
pub fn values(points: &[(f64, Result<SpectrumPoint>)]) -> Vec<f64> {
    points
        .iter()
        .map(|(_, r)| r.as_ref().map(|p| p.total).unwrap_or(f64::NAN))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelOptions;
    use crate::steady::DetuningMode;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(lambda: f64, gain: f64, temperature: f64, g: f64) -> SystemParams {
        let mut p = SystemParams::identical(2.0 * PI * 1e6);
        p.lambda = lambda * p.omega_m1;
        p.gain = gain * p.kappa;
        p.temperature = temperature;
        p.coupling = Some(g * p.omega_m1);
        p
    }

    fn model(lambda: f64, gain: f64, temperature: f64, g: f64) -> Model {
        Model::new(&params(lambda, gain, temperature, g), ModelOptions::default()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn static_susceptibility() {
        assert!((susceptibility(1.3, 0.2, 0.0) - c(1.0 / 1.3)).norm() < 1e-15);
    }

    #[test]
    fn lambda_zero_leaves_chi_undressed() {
        let m = model(0.0, 0.1, 0.3, 1e-3);
        let t = transfer_chain(1.02, &m).unwrap();
        assert_eq!(t.chi_m1_eff, t.chi_m1);
        assert_eq!(t.k2, Complex64::default());
        assert_eq!(t.k5, Complex64::default());
    }

    #[test]
    fn coupling_dresses_resonance() {
        let m = model(0.15, 0.0, 0.0, 1e-3);
        let t = transfer_chain(1.0, &m).unwrap();
        assert!(t.chi_m1_eff.is_finite());
        assert!(t.chi_m1_eff.norm() < t.chi_m1.norm());
        let direct = t.chi_m1 / (1.0 - 0.0225 * t.chi_m1 * t.chi_m2);
        assert!((t.chi_m1_eff - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn uncoupled_cavity_chain() {
        let m = model(0.15, 0.2, 0.0, 0.0);
        let w = 0.97;
        let t = transfer_chain(w, &m).unwrap();
        let k = 100.0;
        let gain = 20.0;
        assert!((t.chi_a - (-I * w + k / 2.0 - 2.0 * gain).inv()).norm() < 1e-15);
        assert!((t.p_a - (-I * w + k / 2.0 + 2.0 * gain).inv()).norm() < 1e-15);
        for z in [t.k2, t.k3, t.k5, t.k6] {
            assert_eq!(z.norm(), 0.0);
        }
    }

    #[test]
    fn zero_coupling_degenerate() {
        let m = model(0.0, 0.0, 1.0, 0.0);
        assert!(matches!(noise_psd(1.0, &m), Err(Error::DegenerateDenominator { .. })));
        assert!(matches!(psd_oracle(1.0, &m), Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn shot_noise_diverges_as_transduction_vanishes() {
        let shot = |g: f64| psd_oracle(1.0, &model(0.0, 0.0, 1.0, g)).unwrap().shot;
        assert!(shot(1e-6) > 1e4 * shot(1e-3));
    }

    #[test]
    fn pole_hit_at_static_soft_mode() {
        // omega = 0 with lambda = omega_m: 1 - lambda^2 chi_m1 chi_m2 = 0
        let mut p = SystemParams::identical(1.0);
        p.coupling = Some(1e-3);
        p.lambda = 1.0;
        let s = crate::steady::solve(&SystemParams { lambda: 0.0, ..p }, DetuningMode::Figure).unwrap();
        assert!(matches!(
            TransferChain::new(0.0, &p, &s),
            Err(Error::PoleHit { .. })
        ));
    }

    #[test]
    fn upper_mode_dip() {
        let m = model(0.15, 0.0, 77e-3, 1e-3);
        let grid = crate::sweep::linspace(0.8, 1.3, 20001);
        let vals = values(&psd_sweep(&grid, &m));
        let i = crate::sweep::argmin(&vals).unwrap();
        assert!((grid[i] - 1.15f64.sqrt()).abs() < 1e-4, "{}", grid[i]);
    }

    #[test]
    fn refined_grid_adds_points_near_minima() {
        let m = model(0.15, 0.0, 77e-3, 1e-3);
        let g = refined_grid(&m, &crate::sweep::linspace(0.8, 1.3, 2001));
        assert!(g.len() > 2001);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let near = g.iter().filter(|w| (**w - 1.15f64.sqrt()).abs() < 2.5e-4).count();
        assert!(near >= 10, "{near}");
    }

    #[test]
    fn quantum_weights_include_half() {
        let mut p = params(0.15, 0.0, 0.0, 1e-3);
        p.temperature = 0.0;
        let q = Model::new(
            &p,
            ModelOptions {
                thermal: ThermalConvention::Quantum,
                ..Default::default()
            },
        )
        .unwrap();
        let s = noise_psd(1.05, &q).unwrap();
        assert!(s.th1 > 0.0 && s.th2 > 0.0);
        let cl = noise_psd(1.05, &Model::new(&p, ModelOptions::default()).unwrap()).unwrap();
        assert_eq!(cl.th1, 0.0);
        assert!((s.ba - cl.ba).abs() <= 1e-15 * s.ba);
    }

    fn oracle_grid_check(m: &Model) {
        for w in crate::sweep::linspace(0.8, 1.3, 1000) {
            let a = noise_psd(w, m).unwrap();
            let b = psd_oracle(w, m).unwrap();
            assert!(rel(a.total, b.total) < 1e-8, "w={w} {a:?} {b:?}");
        }
    }

    #[test]
    fn oracle_matches_with_general_phases() {
        let mut p = params(0.1, 0.12, 1.0, 0.05);
        p.pump_phase = 0.7;
        p.homodyne_phase = -0.4;
        p.delta_a = 3.0 * p.omega_m1;
        let m = Model::new(
            &p,
            ModelOptions {
                detuning: DetuningMode::SelfConsistent,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.steady.phi.abs() > 1e-3);
        assert!(m.steady.delta_eff.abs() > 1e-3);
        oracle_grid_check(&m);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn oracle_equivalence(
            lambda in 0.0f64..0.6, gain in 0.0f64..0.24, g in 1e-4f64..0.3,
            theta in -PI..PI, phi in -1.4f64..1.4, w in 0.5f64..1.5, t in 0.0f64..10.0,
            delta in -5.0f64..5.0,
        ) {
            let mut p = params(lambda, gain, t, g);
            p.pump_phase = theta;
            p.homodyne_phase = phi;
            let mut m = Model::new(&p, ModelOptions::default()).unwrap();
            // arbitrary mean-field phase and detuning exercise every entry of B
            m.steady.phi = theta / 2.0;
            m.steady.delta_eff = delta;
            if m.drift().is_stable().unwrap().stable {
                let a = noise_psd(w, &m).unwrap();
                let b = psd_oracle(w, &m).unwrap();
                for (x, y) in [(a.total, b.total), (a.th1, b.th1), (a.ba, b.ba), (a.shot, b.shot)] {
                    prop_assert!((x - y).abs() <= 1e-8 * a.total, "{:?} {:?}", a, b);
                }
            }
        }

        #[test]
        fn decomposition_closes(lambda in 0.0f64..0.6, gain in 0.0f64..0.24, w in 0.5f64..1.5, phi in -1.4f64..1.4) {
            let mut p = params(lambda, gain, 300.0, 1e-3);
            p.homodyne_phase = phi;
            let m = Model::new(&p, ModelOptions::default()).unwrap();
            for s in [noise_psd(w, &m).unwrap(), psd_oracle(w, &m).unwrap()] {
                let sum = s.th1 + s.th2 + s.ba + s.shot;
                prop_assert!((s.total - sum).abs() <= 1e-12 * s.total);
                prop_assert!(s.th1 >= 0.0 && s.th2 >= 0.0 && s.ba >= 0.0 && s.shot >= 0.0);
            }
        }

        #[test]
        fn lambda_zero_single_oscillator(gain in 0.0f64..0.24, w in 0.5f64..1.5, phi in -1.4f64..1.4) {
            let mut p = params(0.0, gain, 1.0, 1e-3);
            p.homodyne_phase = phi;
            let m = Model::new(&p, ModelOptions::default()).unwrap();
            let s = noise_psd(w, &m).unwrap();
            prop_assert_eq!(s.th2, 0.0);
        }
    }
}
