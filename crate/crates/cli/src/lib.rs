//! Sweep runners behind the `sense` binary.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use optosense::config::{parse_config, parse_override, ConfigFile, Settings};
use optosense::dynamics::build_drift;
use optosense::model::{Model, ModelOptions};
use optosense::normal_modes::{cross_check, AppendixForm};
use optosense::params::SystemParams;
use optosense::presets::{preset, OMEGA_M, PRESET_NAMES};
use optosense::spectrum::{noise_psd, psd_sweep, refined_grid, SpectrumPoint, DEFAULT_GRID};
use optosense::steady::{photon_number_curve, solve};
use optosense::sweep::{minimize, Grid};
use optosense::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    /// S(omega) with its decomposition.
    Spectrum,
    /// S versus homodyne phase at a fixed frequency.
    Phase,
    /// Spectra for several OPA gains (`--values` in units of kappa).
    Gain,
    /// Spectra for several oscillator couplings (`--values` in units of omega_m1).
    Coupling,
    /// S versus optomechanical coupling g at a fixed frequency for several gains.
    Gsweep,
    /// Intracavity photon number versus drive for several gains.
    Photons,
    /// Cavity quadrature variances versus gain for several couplings.
    Squeeze,
    /// Largest drift eigenvalue versus gain, with the bisected onset.
    Stability,
    /// Main spectrum against the normal-mode spectrum.
    Crosscheck,
    /// Golden-section minimum of S inside a bracket.
    Minimize,
    /// Mean-field steady state.
    Steady,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Normalized,
    Literal,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "sense", version, about = "Noise spectral density of an OPA-assisted two-oscillator optomechanical force sensor")]
pub struct Cli {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// Named parameter set (fig2, fig3, fig5, fig6, fig7, fig8, fig9, fig10).
    #[arg(long)]
    pub preset: Option<String>,
    /// Flat TOML config in SI units, applied on top of the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `key=value` override applied last; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Swept-variable grid `start,stop,count[,log]`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Curve family values, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    /// Probe frequency in units of omega_m1 (phase, gsweep).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Coefficient set for crosscheck.
    #[arg(long, value_enum, default_value = "normalized")]
    pub form: FormArg,
    /// Skip automatic refinement around spectral minima.
    #[arg(long)]
    pub no_refine: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV table, or JSON with the resolved config and a summary.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

fn config_err(e: Error) -> CliError {
    match e {
        Error::Config(m) => CliError::Config(m),
        other => CliError::Config(other.to_string()),
    }
}

/// Rows of numbers plus a per-row status flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(Vec<f64>, String)>,
}

impl Table {
    fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, values: Vec<f64>, flag: &str) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push((values, flag.to_string()));
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.1 != OK).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push_str(",flag\n");
        for (vals, flag) in &self.rows {
            for v in vals {
                s.push_str(&format_number(*v));
                s.push(',');
            }
            s.push_str(flag);
            s.push('\n');
        }
        s
    }
}

pub const OK: &str = "ok";

/// Scientific notation with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub subcommand: Subcommand,
    pub preset: Option<String>,
    pub config: ConfigFile,
    pub warnings: Vec<String>,
    pub rows_total: usize,
    pub rows_ok: usize,
    pub rows_flagged: usize,
    pub summary: serde_json::Value,
}

#[derive(Debug)]
pub struct Artifact {
    pub table: Table,
    pub metadata: Metadata,
}

impl Artifact {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => {
                let columns: Vec<serde_json::Value> = self
                    .table
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(j, name)| {
                        let vals: Vec<Option<f64>> = self
                            .table
                            .rows
                            .iter()
                            .map(|r| Some(r.0[j]).filter(|v| v.is_finite()))
                            .collect();
                        serde_json::json!({ "name": name, "values": vals })
                    })
                    .collect();
                let flags: Vec<&str> = self.table.rows.iter().map(|r| r.1.as_str()).collect();
                let doc = serde_json::json!({
                    "metadata": self.metadata,
                    "columns": columns,
                    "flag": flags,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

/// Base parameters when no preset is named: the shared figure base at
/// `T = 0` with `g` derived from the mean field.
pub fn default_params() -> SystemParams {
    SystemParams::identical(OMEGA_M)
}

pub fn resolve_settings(cli: &Cli) -> Result<Settings, CliError> {
    let mut settings = match &cli.preset {
        Some(name) => {
            let p = preset(name).ok_or_else(|| {
                CliError::Config(format!("unknown preset `{name}` (known: {})", PRESET_NAMES.join(", ")))
            })?;
            Settings { params: p.params, options: p.options }
        }
        None => Settings { params: default_params(), options: ModelOptions::default() },
    };
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
        settings = parse_config(&text).and_then(|c| c.apply(settings)).map_err(config_err)?;
    }
    for s in &cli.set {
        settings = parse_override(s).and_then(|c| c.apply(settings)).map_err(config_err)?;
    }
    Ok(settings)
}

fn parse_values(cli: &Cli, default: &[f64]) -> Result<Vec<f64>, CliError> {
    match &cli.values {
        None => Ok(default.to_vec()),
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Config(format!("bad --values entry `{t}`")))
            })
            .collect(),
    }
}

fn parse_grid(cli: &Cli, default: Grid) -> Result<Grid, CliError> {
    match &cli.grid {
        None => Ok(default),
        Some(s) => s.parse().map_err(config_err),
    }
}

fn build(settings: &Settings) -> Result<Model, Error> {
    Model::new(&settings.params, settings.options)
}

/// Errors from invalid parameters are configuration errors; everything
/// else is a runtime failure of the operating point.
fn build_base(settings: &Settings) -> Result<Model, CliError> {
    build(settings).map_err(|e| match e {
        Error::InvalidParams(_) => CliError::Config(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })
}

fn spectrum_grid(cli: &Cli, model: &Model) -> Result<Vec<f64>, CliError> {
    let (a, b, n) = DEFAULT_GRID;
    let grid = parse_grid(cli, Grid { start: a, stop: b, count: n, log: false })?;
    let pts = grid.points();
    Ok(if cli.no_refine || grid.log { pts } else { refined_grid(model, &pts) })
}

fn stability_flag(model: &Model) -> Option<&'static str> {
    match model.drift().is_stable() {
        Ok(r) if r.stable => None,
        Ok(_) => Some("unstable"),
        Err(e) => Some(e.code()),
    }
}

fn spectrum_row(prefix: &[f64], r: &optosense::Result<SpectrumPoint>, unstable: Option<&str>) -> (Vec<f64>, String) {
    let mut v = prefix.to_vec();
    match r {
        Ok(p) => {
            v.extend([p.total, p.th1, p.th2, p.ba, p.shot]);
            (v, unstable.unwrap_or(OK).to_string())
        }
        Err(e) => {
            v.extend([f64::NAN; 5]);
            (v, e.code().to_string())
        }
    }
}

const S_COLS: [&str; 5] = ["S_total", "S_th1", "S_th2", "S_ba", "S_shot"];

fn columns(prefix: &[&str], rest: &[&str]) -> Vec<String> {
    prefix.iter().chain(rest).map(|s| s.to_string()).collect()
}

fn run_spectrum(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let model = build_base(settings)?;
    let grid = spectrum_grid(cli, &model)?;
    let unstable = stability_flag(&model);
    let mut t = Table::new(&[]);
    t.columns = columns(&["omega_over_omega_m"], &S_COLS);
    for (w, r) in psd_sweep(&grid, &model) {
        t.rows.push(spectrum_row(&[w], &r, unstable));
    }
    let summary = serde_json::json!({ "points": grid.len(), "refined": !cli.no_refine });
    Ok((t, summary, warnings(&model)))
}

fn warnings(model: &Model) -> Vec<String> {
    model.warnings.iter().map(|w| w.to_string()).collect()
}

/// Symmetric open interval `(-pi/2, pi/2)` with `Phi = 0` on the grid.
pub fn default_phase_grid() -> Vec<f64> {
    (1..=181).map(|k| (k as f64 - 91.0) * PI / 182.0).collect()
}

fn run_phase(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let model = build_base(settings)?;
    let omega = cli.omega.unwrap_or(1.0);
    let phis = match &cli.grid {
        None => default_phase_grid(),
        Some(_) => parse_grid(cli, Grid { start: 0.0, stop: 1.0, count: 2, log: false })?.points(),
    };
    let unstable = stability_flag(&model);
    let mut t = Table::new(&[]);
    t.columns = columns(&["Phi"], &S_COLS);
    for &phi in &phis {
        let r = noise_psd(omega, &model.with_homodyne_phase(phi));
        t.rows.push(spectrum_row(&[phi], &r, unstable));
    }
    Ok((t, serde_json::json!({ "omega_over_omega_m": omega }), warnings(&model)))
}

/// One spectrum per curve value; `set` writes the value into the params.
fn run_family(
    cli: &Cli,
    settings: &Settings,
    label: &str,
    defaults: &[f64],
    set: fn(&mut SystemParams, f64),
) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let values = parse_values(cli, defaults)?;
    let mut t = Table::new(&[]);
    t.columns = columns(&[label, "omega_over_omega_m"], &S_COLS);
    let mut warn = Vec::new();
    for &v in &values {
        let mut s = *settings;
        set(&mut s.params, v);
        match build(&s) {
            Ok(model) => {
                warn.extend(warnings(&model));
                let grid = spectrum_grid(cli, &model)?;
                let unstable = stability_flag(&model);
                for (w, r) in psd_sweep(&grid, &model) {
                    t.rows.push(spectrum_row(&[v, w], &r, unstable));
                }
            }
            Err(e) => {
                let (a, b, n) = DEFAULT_GRID;
                let grid = parse_grid(cli, Grid { start: a, stop: b, count: n, log: false })?;
                for w in grid.points() {
                    t.rows.push(spectrum_row(&[v, w], &Err(e.clone()), None));
                }
            }
        }
    }
    warn.dedup();
    Ok((t, serde_json::json!({ label: values }), warn))
}

fn run_gsweep(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let gains = parse_values(cli, &[0.0, 0.2])?;
    let grid = parse_grid(cli, Grid { start: 1e-4, stop: 1.0, count: 81, log: true })?;
    let omega = cli.omega.unwrap_or(1.07);
    let mut t = Table::new(&[]);
    t.columns = columns(&["g_over_omega_m", "G_over_kappa"], &S_COLS);
    for g in grid.points() {
        for &gain in &gains {
            let mut s = *settings;
            s.params.coupling = Some(g * s.params.omega_m1);
            s.params.gain = gain * s.params.kappa;
            let row = match build(&s) {
                Ok(m) => spectrum_row(&[g, gain], &noise_psd(omega, &m), stability_flag(&m)),
                Err(e) => spectrum_row(&[g, gain], &Err(e), None),
            };
            t.rows.push(row);
        }
    }
    // first g at which the largest gain stops beating zero gain
    let reversal = reversal_point(&t, &gains);
    let summary = serde_json::json!({
        "omega_over_omega_m": omega,
        "G_over_kappa": gains,
        "first_g_with_enhancement": reversal,
    });
    Ok((t, summary, Vec::new()))
}

fn reversal_point(t: &Table, gains: &[f64]) -> Option<f64> {
    if gains.len() < 2 {
        return None;
    }
    let k = gains.len();
    t.rows.chunks(k).find_map(|chunk| {
        let base = chunk.iter().position(|r| r.0[1] == 0.0)?;
        let (lo, hi) = (chunk[base].0[2], chunk[k - 1].0[2]);
        (chunk.iter().all(|r| r.1 == OK) && hi > lo).then_some(chunk[0].0[0])
    })
}

fn run_photons(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let gains = parse_values(cli, &[0.0, 0.1, 0.2])?;
    let grid = parse_grid(cli, Grid { start: 0.0, stop: 2000.0, count: 101, log: false })?;
    optosense::params::validate(&settings.params)
        .map_err(|e| CliError::Config(Error::InvalidParams(e).to_string()))?;
    let drives = grid.points();
    let base = settings.params.nondimensionalize().params;
    let curves: Vec<Vec<optosense::Result<f64>>> = gains
        .iter()
        .map(|&gain| {
            let p = SystemParams { gain: gain * base.kappa, ..base };
            photon_number_curve(&p, &drives).into_iter().map(|(_, r)| r).collect()
        })
        .collect();
    let mut t = Table::new(&["E_L_over_omega_m"]);
    for g in &gains {
        t.columns.push(format!("N_ave_G_over_kappa_{g}"));
    }
    for (i, &e) in drives.iter().enumerate() {
        let mut v = vec![e];
        let mut flag = OK;
        for c in &curves {
            match &c[i] {
                Ok(n) => v.push(*n),
                Err(err) => {
                    v.push(f64::NAN);
                    flag = err.code();
                }
            }
        }
        t.push(v, flag);
    }
    Ok((t, serde_json::json!({ "G_over_kappa": gains }), Vec::new()))
}

fn run_squeeze(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let lambdas = parse_values(cli, &[0.0, 0.15])?;
    let grid = parse_grid(cli, Grid { start: 0.0, stop: 0.24, count: 25, log: false })?;
    let mut t = Table::new(&["lambda_over_omega_m", "G_over_kappa", "var_xa", "var_pa", "residual"]);
    for &lam in &lambdas {
        for gain in grid.points() {
            let mut s = *settings;
            s.params.lambda = lam * s.params.omega_m1;
            s.params.gain = gain * s.params.kappa;
            match build(&s).and_then(|m| m.drift().steady_covariance()) {
                Ok(c) => t.push(vec![lam, gain, c.var_xa, c.var_pa, c.residual], OK),
                Err(e) => t.push(vec![lam, gain, f64::NAN, f64::NAN, f64::NAN], e.code()),
            }
        }
    }
    Ok((t, serde_json::json!({ "lambda_over_omega_m": lambdas }), Vec::new()))
}

/// Largest real part of the drift spectrum at gain `gain` (units of kappa).
fn max_real(settings: &Settings, gain: f64) -> optosense::Result<f64> {
    let mut p = settings.params;
    p.gain = gain * p.kappa;
    let p = p.nondimensionalize();
    let steady = solve(&p.params, settings.options.detuning)?;
    build_drift(&p.params, &steady, p.thermal_occupancy())
        .is_stable()
        .map(|r| r.max_real_eigenvalue)
}

fn run_stability(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    optosense::params::validate(&settings.params)
        .map_err(|e| CliError::Config(Error::InvalidParams(e).to_string()))?;
    let grid = parse_grid(cli, Grid { start: 0.0, stop: 0.3, count: 61, log: false })?;
    let mut t = Table::new(&["G_over_kappa", "max_real_eigenvalue", "margin", "stable"]);
    let pts = grid.points();
    let mut samples = Vec::new();
    for &gain in &pts {
        match max_real(settings, gain) {
            Ok(x) => {
                t.push(vec![gain, x, -x, if x < 0.0 { 1.0 } else { 0.0 }], OK);
                samples.push((gain, Some(x)));
            }
            Err(e) => {
                t.push(vec![gain, f64::NAN, f64::NAN, f64::NAN], e.code());
                samples.push((gain, None));
            }
        }
    }
    // a singular steady state sits exactly on the boundary, so it closes a bracket too
    let onset = samples.windows(2).find_map(|w| match (w[0].1, w[1].1) {
        (Some(a), b) if a < 0.0 && b.is_none_or(|b| b >= 0.0) => {
            Some(bisect_onset(settings, w[0].0, w[1].0))
        }
        _ => None,
    });
    Ok((t, serde_json::json!({ "onset_G_over_kappa": onset }), Vec::new()))
}

fn bisect_onset(settings: &Settings, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        match max_real(settings, mid) {
            Ok(x) if x < 0.0 => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo + hi)
}

fn run_crosscheck(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let model = build_base(settings)?;
    let grid = parse_grid(cli, Grid { start: 0.9, stop: 1.1, count: 20_001, log: false })?.points();
    let form = match cli.form {
        FormArg::Normalized => AppendixForm::Normalized,
        FormArg::Literal => AppendixForm::Literal,
    };
    let report = cross_check(&grid, &model, form, |w| noise_psd(w, &model))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut t = Table::new(&["omega_over_omega_m", "S_main", "S_appendix", "rel_dev"]);
    for &(w, a, b) in &report.pointwise {
        let flag = if a.is_finite() && b.is_finite() { OK } else { "failed" };
        t.push(vec![w, a, b, (a - b).abs() / a.abs()], flag);
    }
    let summary = serde_json::json!({
        "form": report.form,
        "modes": report.modes,
        "dip_offsets": report.dip_offsets,
        "max_rel_dev_at_modes": report.max_rel_dev_at_modes,
        "max_pointwise_rel_dev": report.max_pointwise_rel_dev,
        "note": report.note,
    });
    Ok((t, summary, warnings(&model)))
}

fn run_minimize(cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let model = build_base(settings)?;
    let grid = parse_grid(cli, Grid { start: 1.0, stop: 1.15, count: 2001, log: false })?;
    if grid.log {
        return Err(CliError::Config("minimize needs a linear bracket".into()));
    }
    let mut t = Table::new(&[
        "omega_star_over_omega_m",
        "omega_star_rad_s",
        "S_star",
        "refinement_iterations",
        "bracket_width",
    ]);
    let r = minimize(|w| noise_psd(w, &model).map(|s| s.total), grid.start, grid.stop, grid.count);
    match r {
        Ok(m) => t.push(
            vec![
                m.omega_star,
                m.omega_star * model.omega_unit,
                m.s_star,
                m.refinement_iterations as f64,
                m.bracket_width,
            ],
            stability_flag(&model).unwrap_or(OK),
        ),
        Err(e) => t.push(vec![f64::NAN; 5], e.code()),
    }
    Ok((t, serde_json::json!({ "bracket": [grid.start, grid.stop] }), warnings(&model)))
}

fn run_steady(_cli: &Cli, settings: &Settings) -> Result<(Table, serde_json::Value, Vec<String>), CliError> {
    let model = build_base(settings)?;
    let s = &model.steady;
    let mut t = Table::new(&[
        "alpha_re",
        "alpha_im",
        "alpha_abs",
        "phi",
        "Delta_a_over_omega_m",
        "Delta_eff_over_omega_m",
        "X1_bar",
        "X2_bar",
        "g_lin_over_omega_m",
        "N_ave",
    ]);
    t.push(
        vec![
            s.alpha.re,
            s.alpha.im,
            s.alpha_abs,
            s.phi,
            s.delta_a,
            s.delta_eff,
            s.x1_bar,
            s.x2_bar,
            s.g_lin,
            s.n_ave,
        ],
        OK,
    );
    Ok((t, serde_json::Value::Null, warnings(&model)))
}

/// Run one subcommand and assemble its artifact.
pub fn run(cli: &Cli) -> Result<Artifact, CliError> {
    let settings = resolve_settings(cli)?;
    let (table, summary, warnings) = match cli.subcommand {
        Subcommand::Spectrum => run_spectrum(cli, &settings)?,
        Subcommand::Phase => run_phase(cli, &settings)?,
        Subcommand::Gain => run_family(cli, &settings, "G_over_kappa", &[0.0, 0.15, 0.2], |p, v| {
            p.gain = v * p.kappa
        })?,
        Subcommand::Coupling => run_family(
            cli,
            &settings,
            "lambda_over_omega_m",
            &[0.0, 0.05, 0.1, 0.15],
            |p, v| p.lambda = v * p.omega_m1,
        )?,
        Subcommand::Gsweep => run_gsweep(cli, &settings)?,
        Subcommand::Photons => run_photons(cli, &settings)?,
        Subcommand::Squeeze => run_squeeze(cli, &settings)?,
        Subcommand::Stability => run_stability(cli, &settings)?,
        Subcommand::Crosscheck => run_crosscheck(cli, &settings)?,
        Subcommand::Minimize => run_minimize(cli, &settings)?,
        Subcommand::Steady => run_steady(cli, &settings)?,
    };
    let flagged = table.flagged();
    let metadata = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.subcommand,
        preset: cli.preset.clone(),
        config: ConfigFile::resolved(&settings),
        warnings,
        rows_total: table.rows.len(),
        rows_ok: table.rows.len() - flagged,
        rows_flagged: flagged,
        summary,
    };
    Ok(Artifact { table, metadata })
}
