use thiserror::Error;

/// Failure modes of the scattering, design and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular network: {0}")]
    SingularNetwork(String),
    #[error("divergent inductance at flux {flux} (cosine of pi*flux vanishes)")]
    DivergentInductance { flux: f64 },
    #[error("inductance {inductance:e} H is below the SQUID minimum {minimum:e} H")]
    InfeasibleInductance { inductance: f64, minimum: f64 },
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),
    #[error("no feasible full-transmission curve: {0}")]
    NoCurve(String),
    #[error("matrix is not invertible (condition estimate {condition:e})")]
    NonInvertible { condition: f64 },
    #[error("no real solution: {0}")]
    NoRealSolution(String),
    #[error("no transmission band: {0}")]
    NoBand(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("calibration failed: residual {residual:e} exceeds {tolerance:e}")]
    CalibrationFailed { residual: f64, tolerance: f64 },
    #[error("run aborted: {0}")]
    AbortedRun(String),
    #[error("undefined density: {0}")]
    UndefinedDensity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
