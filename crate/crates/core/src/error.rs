use thiserror::Error;

/// A configuration outside the modelled regime.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegimeError {
    #[error("{field}={value} must be positive and finite")]
    NonPositive { field: &'static str, value: f64 },
    #[error("x=2*rabi/omega0={x} violates bound x<{bound}")]
    StrongCoupling { x: f64, bound: f64 },
    #[error("omega/omega0={ratio} violates bound omega/omega0<{bound}")]
    DriveTooFast { ratio: f64, bound: f64 },
    #[error("truncation for argument {arg} needs n0={needed} but 2*n0*omega/omega0<1 caps it at {cap}")]
    TruncationCap { arg: f64, needed: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BesselError {
    #[error("bessel argument {arg} or order {order} outside the supported range")]
    OutOfRange { order: i64, arg: f64 },
    #[error("bessel recurrence failed to normalize at argument {arg}")]
    NoConvergence { arg: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("regime: {0}")]
    Regime(#[from] RegimeError),
    #[error("config: {0}")]
    Config(String),
    #[error("numeric: {0}")]
    Bessel(#[from] BesselError),
    #[error("numeric: step size underflow at t={t} (h={h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("numeric: step budget of {steps} exhausted at t={t}")]
    StepBudget { t: f64, steps: usize },
    #[error("resource: spectrum support {support} exceeds cap {cap}")]
    SpectrumTooLarge { support: usize, cap: usize },
    #[error("invariant: {what} residual {value:e} at t={t}")]
    Invariant { what: &'static str, value: f64, t: f64 },
    #[error("config: unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line surface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Regime(_) | Error::Config(_) | Error::UnknownPreset { .. } => 2,
            Error::Invariant { .. } => 4,
            _ => 3,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Regime(_) => "regime",
            Error::Config(_) | Error::UnknownPreset { .. } => "config",
            Error::Invariant { .. } => "invariant",
            Error::SpectrumTooLarge { .. } => "resource",
            Error::Io(_) => "io",
            _ => "numeric",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
