use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("particle {index} is off the unit circle (residual {residual:e})")]
    ConstraintViolation { index: usize, residual: f64 },

    #[error("particle {index} at angle {theta} is too close to ±π/2 (tan singularity)")]
    TangentSingularity { index: usize, theta: f64 },

    #[error("particles {first} and {second} collide (|sin Δθ| = {separation:e})")]
    CollisionSingularity {
        first: usize,
        second: usize,
        separation: f64,
    },

    #[error("mass coefficient mu[{index}] is zero")]
    ZeroMass { index: usize },

    #[error("operation requires {expected}, got {found}")]
    WrongKind { expected: &'static str, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("right-hand side became singular near t = {t}: {source}")]
    SingularityEncountered { t: f64, source: Box<Error> },

    #[error("step limit of {steps} exceeded at t = {t}")]
    StepLimitExceeded { t: f64, steps: usize },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("vector {index} has norm {norm}, cannot project onto the unit circle")]
    DegenerateVector { index: usize, norm: f64 },

    #[error("sample grid mismatch: {0}")]
    GridMismatch(String),

    #[error("leading coefficient |h_N| = {magnitude:e} is degenerate")]
    DegenerateLeadingCoefficient { magnitude: f64 },

    #[error("polynomial has (nearly) repeated roots, separation {separation:e}")]
    RepeatedRoots { separation: f64 },

    #[error("evaluation point coincides with pole {index}")]
    PoleHit { index: usize },

    #[error("continuation failed after t = {last_good_t}: {reason}")]
    ContinuationFailure { last_good_t: f64, reason: String },
}

impl Error {
    /// Whether this error marks a genuine singular point of the dynamics
    /// rather than bad input.
    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::TangentSingularity { .. }
                | Error::CollisionSingularity { .. }
                | Error::SingularityEncountered { .. }
                | Error::PoleHit { .. }
                | Error::ContinuationFailure { .. }
                | Error::RepeatedRoots { .. }
                | Error::DegenerateLeadingCoefficient { .. }
        )
    }
}
