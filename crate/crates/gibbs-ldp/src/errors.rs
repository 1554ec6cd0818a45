use thiserror::Error;

/// Errors shared across the geometry, model, sampling and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the window (coordinate {coord} not in [-{half}, {half}))")]
    PointOutsideWindow { coord: f64, half: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("query radius too large: need 2*{radius} < window side {side}")]
    RadiusTooLarge { radius: f64, side: f64 },

    #[error("cube side too large: need {cube_side} <= window side {side}")]
    SideTooLarge { cube_side: f64, side: f64 },

    #[error("boundary Hamiltonian requested without a boundary condition")]
    MissingBoundaryCondition,

    #[error("boundary Hamiltonians are not defined for the hard-core interaction")]
    HardCoreBoundary,

    #[error("configuration has {got} points but the window budget is {expected}")]
    WrongPointCount { expected: usize, got: usize },

    #[error("no feasible hard-core start found after {attempts} proposals")]
    InfeasibleStart { attempts: usize },

    #[error("non-finite energy: {0}")]
    NonFiniteEnergy(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("dense count {dense} is not below the sparse-cube count {cubes}")]
    DensityExceedsCubes { dense: usize, cubes: usize },

    #[error("binomial tail bound out of regime: need k >= e^2*n*p = {threshold}, got {k}")]
    OutOfRegime { k: f64, threshold: f64 },

    #[error("window too small: need at least {needed} points, window has budget {got}")]
    WindowTooSmall { needed: usize, got: usize },

    #[error("all Monte-Carlo weights were zero; the naive estimator cannot resolve this model")]
    AllZeroWeights,

    #[error("no samples hit the tail region; the event is too rare for naive estimation")]
    ZeroHits,

    #[error("coupling does not satisfy the required event: {0}")]
    EventNotSatisfied(String),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("configuration value for `{key}` has the wrong type: {message}")]
    TypeMismatch { key: String, message: String },

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 config, 2 estimator, 3 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AllZeroWeights | Error::ZeroHits => 2,
            Error::EventNotSatisfied(_) => 3,
            _ => 1,
        }
    }
}
