use thiserror::Error;

/// Errors raised by the algebra, the force models and the integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("velocity is not normalized: eta(u,u) = {value} (expected -1 within {tolerance:e})")]
    Normalization { value: f64, tolerance: f64 },

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("curve is not timelike at sample {index} (eta(x',x') = {norm})")]
    NotTimelike { index: usize, norm: f64 },

    #[error("outside the maximal-acceleration domain: epsilon = {epsilon} at parameter {at}")]
    DomainBreach { epsilon: f64, at: f64 },

    #[error("reparameterization is not strictly increasing at sample {index}")]
    NotMonotone { index: usize },

    #[error("degenerate regime: |eps_dot| = {eps_dot:e} is below {eps_dot_min:e}")]
    DegenerateRegime { eps_dot: f64, eps_dot_min: f64 },

    #[error("implicit acceleration did not converge after {iterations} iterations (residual {residual:e}){}",
        stage.map(|s| format!(" at RK stage {s}")).unwrap_or_default())]
    NoConvergence {
        iterations: usize,
        residual: f64,
        stage: Option<usize>,
    },

    #[error("maximal acceleration breached: a^2 = {a2} >= A_max^2 = {limit}")]
    MaximalAccelBreach { a2: f64, limit: f64 },

    #[error("covariant uniform regime violated: |eps_dot| = {eps_dot:e} >= {eps_dot_min:e}")]
    RegimeViolation { eps_dot: f64, eps_dot_min: f64 },

    #[error("run-away: a^2 grew by a factor {ratio:e} at tau = {tau}")]
    RunawayAbort { ratio: f64, tau: f64 },

    #[error("step size underflow at tau = {tau} (dt = {dt:e})")]
    StepSizeUnderflow { tau: f64, dt: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
