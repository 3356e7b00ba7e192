//! Normal-mode description of two identical coupled oscillators, used as an
//! independent cross-check of the main spectrum.
//!
//! For identical oscillators the coupling `lambda X1 X2` hybridizes them into
//! a symmetric mode at `sqrt(omega_m^2 + lambda omega_m)` and an
//! antisymmetric mode at `sqrt(omega_m^2 - lambda omega_m)`. Modes are
//! labeled by frequency. The common external force drives only the
//! symmetric (high) mode.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::params::{SystemParams, ThermalOccupancy};
use crate::spectrum::{SpectrumPoint, POLE_TOL};
use crate::sweep::{local_maxima, local_minima};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalModes {
    pub omega_m: f64,
    pub omega_high: f64,
    pub omega_low: f64,
    /// `A = sqrt(omega_m/omega_j) + sqrt(omega_j/omega_m)` for `[high, low]`.
    pub a: [f64; 2],
    /// `A^- = sqrt(omega_m/omega_j) - sqrt(omega_j/omega_m)`.
    pub a_minus: [f64; 2],
    /// Linear map `(b1, b2, b1^+, b2^+) = map (c_high, c_low, c_high^+, c_low^+)`.
    #[serde(skip)]
    pub map: Matrix4<f64>,
}

fn identical(p: &SystemParams) -> Result<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !close(p.omega_m1, p.omega_m2) {
        return Err(Error::AppendixAssumption("oscillator frequencies must be equal"));
    }
    if !close(p.gamma_m1, p.gamma_m2) {
        return Err(Error::AppendixAssumption("oscillator damping rates must be equal"));
    }
    Ok(())
}

/// Normal modes of the identical-oscillator pair.
pub fn diagonalize(p: &SystemParams) -> Result<NormalModes> {
    identical(p)?;
    let wm = p.omega_m1;
    let lam = p.lambda;
    if lam >= wm {
        return Err(Error::SoftMode { lambda: lam, omega_m: wm });
    }
    let high = (wm * wm + lam * wm).sqrt();
    let low = (wm * wm - lam * wm).sqrt();
    let coef = |w: f64| ((wm / w).sqrt() + (w / wm).sqrt(), (wm / w).sqrt() - (w / wm).sqrt());
    let (a1, m1) = coef(high);
    let (a2, m2) = coef(low);
    let s = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    #[rustfmt::skip]
    let map = Matrix4::new(
        a1,  a2,  m1,  m2,
        a1, -a2,  m1, -m2,
        m1,  m2,  a1,  a2,
        m1, -m2,  a1, -a2,
    ) * s;
    Ok(NormalModes {
        omega_m: wm,
        omega_high: high,
        omega_low: low,
        a: [a1, a2],
        a_minus: [m1, m2],
        map,
    })
}

impl NormalModes {
    pub fn frequencies(&self) -> [f64; 2] {
        [self.omega_high, self.omega_low]
    }

    /// Potential matrix whose eigenvalues are the squared mode frequencies.
    pub fn potential_matrix(omega_m: f64, lambda: f64) -> Matrix2<f64> {
        Matrix2::new(omega_m * omega_m, lambda * omega_m, lambda * omega_m, omega_m * omega_m)
    }
}

/// Which coefficient set the normal-mode spectrum uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppendixForm {
    /// Canonically normalized mode operators (couplings scaled by
    /// `sqrt(omega_m / 2 omega_j)`).
    #[default]
    Normalized,
    /// The closed-form coefficients as commonly printed for this model,
    /// which carry unnormalized mode couplings.
    Literal,
}

/// Force-referred transfer of each input channel at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixCoefficients {
    /// Amplitude-quadrature input.
    pub a: Complex64,
    /// Phase-quadrature input.
    pub b: Complex64,
    /// Thermal force on oscillator 1.
    pub c: Complex64,
    /// Thermal force on oscillator 2.
    pub d: Complex64,
}

impl AppendixCoefficients {
    pub fn spectrum(&self, omega: f64, w: ThermalOccupancy) -> SpectrumPoint {
        let th1 = w.n_th1 * self.c.norm_sqr();
        let th2 = w.n_th2 * self.d.norm_sqr();
        let ba = 0.5 * self.a.norm_sqr();
        let shot = 0.5 * self.b.norm_sqr();
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

/// The normal-mode model assumes an on-resonance real mean field, a
/// phase-aligned pump and phase-quadrature readout.
fn operating_point(model: &Model) -> Result<()> {
    let s = &model.steady;
    let p = &model.params;
    if s.phi != 0.0 || s.delta_eff != 0.0 {
        return Err(Error::AppendixAssumption("requires Delta' = 0 and phi = 0"));
    }
    if p.pump_phase != 0.0 {
        return Err(Error::AppendixAssumption("requires theta = 0"));
    }
    if p.homodyne_phase != 0.0 {
        return Err(Error::AppendixAssumption("requires Phi = 0"));
    }
    identical(p)
}

fn inv(den: Complex64, omega: f64, what: &'static str) -> Result<Complex64> {
    if den.norm() < POLE_TOL || !den.is_finite() {
        return Err(Error::PoleHit { omega, what });
    }
    Ok(den.inv())
}

pub fn coefficients(omega: f64, model: &Model, form: AppendixForm) -> Result<AppendixCoefficients> {
    operating_point(model)?;
    let modes = diagonalize(&model.params)?;
    match form {
        AppendixForm::Normalized => normalized(omega, model, &modes),
        AppendixForm::Literal => literal(omega, model, &modes),
    }
}

fn normalized(w: f64, model: &Model, modes: &NormalModes) -> Result<AppendixCoefficients> {
    let p = &model.params;
    let g = model.steady.g_lin;
    let k = p.kappa;
    let sk = k.sqrt();
    let gm = p.gamma_m1;
    let wm = modes.omega_m;
    let o = modes.frequencies();

    let mut chi = [Complex64::default(); 2];
    for j in 0..2 {
        chi[j] = o[j] * inv(Complex64::new(o[j] * o[j] - w * w, -w * gm), w, "normal-mode susceptibility")?;
    }
    // readout and backaction couplings are equal for canonical modes
    let coupling = o.map(|oj| g * (wm / (2.0 * oj)).sqrt());
    let force = o.map(|oj| (wm / oj).sqrt() * (2.0 * gm).sqrt() / std::f64::consts::SQRT_2);
    let ca = inv(-I * w + k / 2.0 - 2.0 * p.gain, w, "cavity amplitude response")?;
    let pa = inv(-I * w + k / 2.0 + 2.0 * p.gain, w, "cavity phase response")?;

    // output phase quadrature for a unit source projected onto the modes
    let through_modes = |proj: [f64; 2]| -> Complex64 {
        -(0..2)
            .map(|j| coupling[j] * chi[j] * force[j] * proj[j])
            .sum::<Complex64>()
            * pa
            * sk
    };
    let signal = through_modes([2.0, 0.0]);
    if !(signal.norm() >= crate::spectrum::DEGENERATE_TOL) {
        return Err(Error::DegenerateDenominator { omega: w });
    }
    let x_in = (0..2)
        .map(|j| coupling[j] * chi[j] * coupling[j])
        .sum::<Complex64>()
        * ca
        * sk
        * pa
        * sk;
    let p_in = pa * k - 1.0;
    Ok(AppendixCoefficients {
        a: x_in / signal,
        b: p_in / signal,
        c: through_modes([1.0, 1.0]) / signal,
        d: through_modes([1.0, -1.0]) / signal,
    })
}

fn literal(w: f64, model: &Model, modes: &NormalModes) -> Result<AppendixCoefficients> {
    let p = &model.params;
    let g = model.steady.g_lin;
    let k = p.kappa;
    let gain = p.gain;
    let lam = p.lambda;
    let gm = p.gamma_m1;
    let wm = modes.omega_m;
    let (o1, o2) = (modes.omega_high, modes.omega_low);
    let sqrt2 = std::f64::consts::SQRT_2;

    let low_res = I * gm * w + w * w + (lam - wm) * wm;
    let den = (4.0 * gain - k + 2.0 * I * w) * wm * low_res;
    let den_inv = inv(den, w, "literal A denominator")?;
    let a = I * g * k.sqrt() * o2 * (wm / o1).sqrt() * (wm / o2).sqrt()
        * (gm * w - I * w * w + I * lam * wm + I * wm * wm)
        * den_inv
        / (2.0 * gm).sqrt()
        + I * g * k.sqrt() * (gm * w * wm - I * w * w * wm - I * lam * wm * wm + I * wm.powi(3)) * den_inv
            / (sqrt2 * gm.sqrt());
    if g * (k * gm).sqrt() * wm == 0.0 {
        return Err(Error::DegenerateDenominator { omega: w });
    }
    let b = (-4.0 * gain + k + 2.0 * I * w) * (I * gm * w + w * w - wm * (lam + wm))
        / (4.0 * g * (k * gm).sqrt() * wm);
    let ratio = (wm / o1).sqrt() * (-I * gm * w - w * w + wm * (lam + wm))
        * inv((wm / o2).sqrt() * low_res, w, "literal C/D denominator")?;
    Ok(AppendixCoefficients {
        a,
        b,
        c: 0.5 * (1.0 - ratio),
        d: 0.5 * (1.0 + ratio),
    })
}

/// Normal-mode spectrum at `omega` (units of `omega_m1`), readout at `Phi = 0`.
pub fn appendix_psd(omega: f64, model: &Model, form: AppendixForm) -> Result<SpectrumPoint> {
    Ok(coefficients(omega, model, form)?.spectrum(omega, model.thermal_weights))
}

/// Labels used in reports.
pub const MODE_LABELS: [&str; 2] = ["high", "low"];

/// Frequency assignment caveat carried in every report.
pub const LABELING_NOTE: &str = "modes are labeled by frequency: high = sqrt(omega_m^2 + lambda omega_m) \
(symmetric, force-driven), low = sqrt(omega_m^2 - lambda omega_m) (antisymmetric); \
published index conventions for omega_1/omega_2 disagree, so indices are not used";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeComparison {
    pub label: &'static str,
    /// Mode frequency from [`diagonalize`].
    pub omega_mode: f64,
    /// Extremum of the main spectrum nearest the mode.
    pub main_feature: f64,
    pub appendix_feature: f64,
    /// `|main_feature - appendix_feature|`.
    pub dip_offset: f64,
    pub main_value: f64,
    pub appendix_value: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub form: AppendixForm,
    pub modes: Vec<ModeComparison>,
    pub dip_offsets: Vec<f64>,
    pub max_rel_dev_at_modes: f64,
    /// Largest pointwise relative deviation over points where both succeed.
    pub max_pointwise_rel_dev: f64,
    /// `(omega, main, appendix)`, NaN where a path failed.
    pub pointwise: Vec<(f64, f64, f64)>,
    pub note: &'static str,
}

/// Nearest local extremum (minimum or maximum) of `v` to `target`.
fn nearest_feature(grid: &[f64], v: &[f64], target: f64) -> Option<usize> {
    local_minima(v)
        .into_iter()
        .chain(local_maxima(v))
        .min_by(|&a, &b| (grid[a] - target).abs().total_cmp(&(grid[b] - target).abs()))
}

/// Compare `main` against the normal-mode spectrum on `grid`.
pub fn cross_check<F>(grid: &[f64], model: &Model, form: AppendixForm, main: F) -> Result<CrossCheckReport>
where
    F: Fn(f64) -> Result<SpectrumPoint> + Sync,
{
    use rayon::prelude::*;
    let modes = diagonalize(&model.params)?;
    operating_point(model)?;
    let pointwise: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&w| {
            let m = main(w).map(|s| s.total).unwrap_or(f64::NAN);
            let a = appendix_psd(w, model, form).map(|s| s.total).unwrap_or(f64::NAN);
            (w, m, a)
        })
        .collect();
    let mv: Vec<f64> = pointwise.iter().map(|t| t.1).collect();
    let av: Vec<f64> = pointwise.iter().map(|t| t.2).collect();
    let rel = |m: f64, a: f64| (m - a).abs() / m.abs();
    let max_pointwise_rel_dev = pointwise
        .iter()
        .filter(|t| t.1.is_finite() && t.2.is_finite())
        .map(|t| rel(t.1, t.2))
        .fold(0.0, f64::max);

    let mut out = Vec::new();
    for (label, target) in MODE_LABELS.iter().zip(modes.frequencies()) {
        let (mi, ai) = (nearest_feature(grid, &mv, target), nearest_feature(grid, &av, target));
        let (main_feature, main_value) = mi.map_or((f64::NAN, f64::NAN), |i| (grid[i], mv[i]));
        let (appendix_feature, appendix_value) = ai.map_or((f64::NAN, f64::NAN), |i| (grid[i], av[i]));
        out.push(ModeComparison {
            label,
            omega_mode: target,
            main_feature,
            appendix_feature,
            dip_offset: (main_feature - appendix_feature).abs(),
            main_value,
            appendix_value,
            rel_dev: rel(main_value, appendix_value),
        });
    }
    // NaN propagates so that a missing feature cannot pass a threshold
    let max_rel_dev_at_modes = out.iter().map(|m| m.rel_dev).fold(0.0, nan_max);
    Ok(CrossCheckReport {
        form,
        dip_offsets: out.iter().map(|m| m.dip_offset).collect(),
        modes: out,
        max_rel_dev_at_modes,
        max_pointwise_rel_dev,
        pointwise,
        note: LABELING_NOTE,
    })
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
