use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} is outside the schedule window [{t0}, {t1}]")]
    OutOfWindow { t: f64, t0: f64, t1: f64 },

    #[error("non-oscillatory parameters: alpha*gamma - beta^2 = {discriminant} (alpha={alpha}, beta={beta}, gamma={gamma})")]
    NonOscillatory {
        alpha: f64,
        beta: f64,
        gamma: f64,
        discriminant: f64,
    },

    #[error("surface mesh leaves the oscillatory region at (alpha={alpha}, beta={beta}, gamma={gamma})")]
    NonOscillatoryOnSurface { alpha: f64, beta: f64, gamma: f64 },

    #[error("amplitude {r} is too small to define a phase")]
    ZeroAmplitude { r: f64 },

    #[error("trajectory undersampled between samples {index} and {next}: phase gap {gap} rad is ambiguous")]
    UndersampledTrajectory { index: usize, next: usize, gap: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("maximum number of integrator steps ({max_steps}) exceeded at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(&'static str),

    #[error("singular configuration at phi = {phi} (|phi| must stay below pi/2 - 1e-9)")]
    SingularConfiguration { phi: f64 },

    #[error("accumulated damping {lambda} would overflow the exponential map")]
    Overflow { lambda: f64 },

    #[error("sample (q={q}, qdot={qdot}, t={t}) lies outside the validity domain of {model}")]
    DomainViolation {
        model: &'static str,
        q: f64,
        qdot: f64,
        t: f64,
    },

    #[error("variational spec {0} has no Lagrangian")]
    MissingLagrangian(&'static str),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
