use thiserror::Error;

/// A single violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("`{field}` must be strictly positive (got {value})")]
    NonPositiveRate { field: &'static str, value: f64 },
    #[error("`{field}` must be non-negative (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("`{field}` is not finite")]
    NotFinite { field: &'static str },
    #[error("kappa_ex/kappa = {ratio} lies outside the overcoupled range (0.9, 1]")]
    Undercoupled { ratio: f64 },
    #[error("oscillator pair is statically unstable: omega_m1*omega_m2 = {product} <= lambda^2 = {lambda_sq}")]
    StaticInstability { product: f64, lambda_sq: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<ParamError>),
    #[error("steady-state iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("multiple steady states, effective detunings {roots:?}")]
    Bistability { roots: Vec<f64> },
    #[error("steady-state field diverges (kappa^2/4 + Delta'^2 - 4G^2 = 0)")]
    SingularSteadyState,
    #[error("eigenvalue computation did not converge")]
    EigenFailure,
    #[error("drift matrix is unstable (max real eigenvalue {max_real})")]
    UnstableSystem { max_real: f64 },
    #[error("Lyapunov solve failed: {0}")]
    SolverFailure(&'static str),
    #[error("transfer chain pole at omega = {omega}: {what}")]
    PoleHit { omega: f64, what: &'static str },
    #[error("homodyne angle nulls the signal channel at omega = {omega}")]
    DegenerateDenominator { omega: f64 },
    #[error("resolvent (-i omega - B) is singular at omega = {omega}")]
    SingularResolvent { omega: f64 },
    #[error("soft normal mode: lambda = {lambda} >= omega_m = {omega_m}")]
    SoftMode { lambda: f64, omega_m: f64 },
    #[error("normal-mode model assumption violated: {0}")]
    AppendixAssumption(&'static str),
    #[error("no interior minimum in bracket [{lo}, {hi}]")]
    NoMinimumInBracket { lo: f64, hi: f64 },
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Short stable code used in flagged sweep rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Bistability { .. } => "bistability",
            Error::SingularSteadyState => "singular_steady_state",
            Error::EigenFailure => "eigen_failure",
            Error::UnstableSystem { .. } => "unstable",
            Error::SolverFailure(_) => "solver_failure",
            Error::PoleHit { .. } => "pole_hit",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::SingularResolvent { .. } => "singular_resolvent",
            Error::SoftMode { .. } => "soft_mode",
            Error::AppendixAssumption(_) => "appendix_assumption",
            Error::NoMinimumInBracket { .. } => "no_minimum",
            Error::Config(_) => "config",
        }
    }
}

fn join(errs: &[ParamError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
