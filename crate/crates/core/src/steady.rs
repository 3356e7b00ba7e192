//! Classical mean-field steady state of the driven cavity and oscillators.
//!
//! The cavity amplitude depends on the effective detuning
//! `Delta' = Delta_a + g0 X1`, while `X1` depends on `|alpha|^2`; the
//! self-consistent solution is the root of a real scalar equation in
//! `Delta'`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// How the effective detuning is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DetuningMode {
    /// `Delta' = 0` and `phi = 0`: the bare detuning is assumed tuned to
    /// cancel the radiation-pressure shift. Every figure preset uses this.
    #[default]
    Figure,
    /// Solve the mean-field fixed point for the given bare detuning.
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub alpha: Complex64,
    pub alpha_abs: f64,
    /// Phase of the mean field (rad).
    pub phi: f64,
    /// Bare detuning actually in effect (recomputed in figure mode).
    pub delta_a: f64,
    /// Effective detuning `Delta_a + g0 X1`.
    pub delta_eff: f64,
    pub x1_bar: f64,
    pub x2_bar: f64,
    /// Linearized coupling `g`.
    pub g_lin: f64,
    /// Intracavity photon number `|alpha|^2`.
    pub n_ave: f64,
}

pub const PICARD_DAMPING: f64 = 0.5;
pub const PICARD_TOL: f64 = 1e-12;
pub const PICARD_MAX_ITER: usize = 10_000;
const SCAN_INTERVALS: usize = 4096;

/// Mean field for a fixed effective detuning.
pub fn cavity_amplitude(p: &SystemParams, delta_eff: f64) -> Result<Complex64> {
    let k = p.kappa;
    let g = p.gain;
    let den = delta_eff * delta_eff + k * k / 4.0 - 4.0 * g * g;
    if den.abs() <= f64::EPSILON * (k * k / 4.0 + delta_eff * delta_eff) {
        return Err(Error::SingularSteadyState);
    }
    let num = Complex64::new(k / 2.0, -delta_eff) + 2.0 * g * Complex64::cis(p.pump_phase);
    Ok(num * p.drive_amplitude() / den)
}

/// Closed-form phase of the mean field, `atan2(4G sin(theta) - 2 Delta',
/// 4G cos(theta) + kappa)`. Agrees with `arg(alpha)` whenever the drive is
/// positive and `Delta'^2 + kappa^2/4 > 4 G^2`.
pub fn field_phase(p: &SystemParams, delta_eff: f64) -> f64 {
    let th = p.pump_phase;
    (4.0 * p.gain * th.sin() - 2.0 * delta_eff).atan2(4.0 * p.gain * th.cos() + p.kappa)
}

fn displacement_factor(p: &SystemParams) -> f64 {
    p.omega_m1 * p.omega_m2 - p.lambda * p.lambda
}

fn mean_displacements(p: &SystemParams, n: f64) -> (f64, f64) {
    let den = displacement_factor(p);
    (
        -p.g0 * n * p.omega_m2 / den,
        p.lambda * p.g0 * n / den,
    )
}

fn assemble(p: &SystemParams, alpha: Complex64, phi: f64, delta_a: f64, delta_eff: f64) -> SteadyState {
    let n = alpha.norm_sqr();
    let (x1, x2) = mean_displacements(p, n);
    let alpha_abs = alpha.norm();
    SteadyState {
        alpha,
        alpha_abs,
        phi,
        delta_a,
        delta_eff,
        x1_bar: x1,
        x2_bar: x2,
        g_lin: p
            .coupling
            .unwrap_or(std::f64::consts::SQRT_2 * alpha_abs * p.g0),
        n_ave: n,
    }
}

/// Solve the mean-field steady state.
///
/// Works in any consistent unit system. In [`DetuningMode::Figure`] the
/// bare detuning is replaced by `-g0 X1` so that `Delta' = 0`, and the field
/// is taken real (`phi = 0`).
pub fn solve(p: &SystemParams, mode: DetuningMode) -> Result<SteadyState> {
    match mode {
        DetuningMode::Figure => {
            let alpha = cavity_amplitude(p, 0.0)?;
            let alpha = Complex64::new(alpha.norm(), 0.0);
            let (x1, _) = mean_displacements(p, alpha.norm_sqr());
            Ok(assemble(p, alpha, 0.0, -p.g0 * x1, 0.0))
        }
        DetuningMode::SelfConsistent => solve_self_consistent(p),
    }
}

/// Residual of the detuning fixed point: `Delta' - Delta_a + K |alpha(Delta')|^2`.
fn residual(p: &SystemParams, delta_eff: f64) -> Result<f64> {
    let k = p.g0 * p.g0 * p.omega_m2 / displacement_factor(p);
    Ok(delta_eff - p.delta_a + k * cavity_amplitude(p, delta_eff)?.norm_sqr())
}

fn picard(p: &SystemParams) -> Option<f64> {
    let k = p.g0 * p.g0 * p.omega_m2 / displacement_factor(p);
    let scale = p.kappa.max(p.delta_a.abs());
    let mut d = p.delta_a;
    for _ in 0..PICARD_MAX_ITER {
        let n = cavity_amplitude(p, d).ok()?.norm_sqr();
        let next = (1.0 - PICARD_DAMPING) * d + PICARD_DAMPING * (p.delta_a - k * n);
        if !next.is_finite() {
            return None;
        }
        if (next - d).abs() <= PICARD_TOL * scale.max(next.abs()) {
            return Some(next);
        }
        d = next;
    }
    None
}

/// All sign changes of the residual on the a-priori bracket of `Delta'`,
/// each refined by bisection. Needs `G < kappa/4` so that the bracket is
/// finite.
fn bracket_roots(p: &SystemParams) -> Vec<f64> {
    let k = p.kappa;
    let c = k * k / 4.0 - 4.0 * p.gain * p.gain;
    if c <= 0.0 {
        return Vec::new();
    }
    // |alpha| <= E ((kappa/2 + 2G)/c + 1/(2 sqrt c)) for every real Delta'.
    let amp = p.drive_amplitude() * ((k / 2.0 + 2.0 * p.gain) / c + 0.5 / c.sqrt());
    let kk = p.g0 * p.g0 * p.omega_m2 / displacement_factor(p);
    let lo = p.delta_a - kk * amp * amp;
    let hi = p.delta_a;
    if lo == hi {
        return vec![hi];
    }
    let f = |d: f64| residual(p, d).unwrap_or(f64::NAN);
    let step = (hi - lo) / SCAN_INTERVALS as f64;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=SCAN_INTERVALS {
        let b = if i == SCAN_INTERVALS { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(bisect(&f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(a);
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

fn solve_self_consistent(p: &SystemParams) -> Result<SteadyState> {
    let picard_root = picard(p);
    let roots = bracket_roots(p);
    let distinct = dedup_roots(&roots, p.kappa);
    if distinct.len() > 1 {
        return Err(Error::Bistability { roots: distinct });
    }
    // a bracketed root is bisected to machine precision; Picard alone only
    // reaches its stopping tolerance
    let d = match (picard_root, distinct.first()) {
        (_, Some(&d)) => d,
        (Some(d), None) => d,
        (None, None) => {
            return Err(Error::NoConvergence {
                iterations: PICARD_MAX_ITER,
            })
        }
    };
    let alpha = cavity_amplitude(p, d)?;
    Ok(assemble(p, alpha, alpha.arg(), p.delta_a, d))
}

fn dedup_roots(roots: &[f64], scale: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &r in roots {
        if out.last().is_none_or(|&l| (r - l).abs() > 1e-9 * scale) {
            out.push(r);
        }
    }
    out
}

/// Photon number against drive amplitude at resonance with `theta = 0`.
/// Failed points are returned as errors and do not stop the sweep.
pub fn photon_number_curve(p: &SystemParams, drive_grid: &[f64]) -> Vec<(f64, Result<f64>)> {
    drive_grid
        .iter()
        .map(|&e| {
            let mut q = *p;
            q.drive = crate::params::Drive::Amplitude(e);
            q.pump_phase = 0.0;
            (e, solve(&q, DetuningMode::Figure).map(|s| s.n_ave))
        })
        .collect()
}
