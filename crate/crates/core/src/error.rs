use thiserror::Error;

/// One accepted integrator step, kept for trajectory dumps.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub coords: Vec<f64>,
    pub constraint: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    Chart(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("non-finite value while evaluating {what} (coordinate `{coordinate}`)")]
    NonFinite { what: String, coordinate: String },

    #[error("point is off the level set: |value| = {value:e} exceeds tolerance {tol:e}")]
    OffSurface { value: f64, tol: f64 },

    #[error("critical point on level set: gradient norm {norm:e}")]
    CriticalPoint { norm: f64 },

    #[error("degenerate tangent basis: a vector has norm {norm:e}")]
    DegenerateBasis { norm: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("transversality fails at {witness:?}: df^D(Z^D) = {value:e}")]
    Transversality { witness: Vec<f64>, value: f64 },

    #[error("singular denominator {value:e} in {field} at {point:?}")]
    SingularDenominator { field: &'static str, point: Vec<f64>, value: f64 },

    #[error("step size underflow (h = {h:e}) at t = {t}; problem is stiff or singular")]
    StepUnderflow { t: f64, h: f64, trajectory: Vec<TrajectoryRow> },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("flow left the hypersurface: drift {drift:e} > {limit:e}")]
    FlowEscape { drift: f64, limit: f64 },

    #[error("map reverses coorientation: conformal factor {factor:e}")]
    CoorientationReversal { factor: f64 },

    #[error("invalid Lagrangian family at sample {sample}: {what} (residual {residual:e})")]
    FamilyInvalid { sample: usize, what: String, residual: f64 },

    #[error("singular matrix at sample {sample}: |det| = {det:e}")]
    SingularMatrix { sample: usize, det: f64 },

    #[error("loop undersampled: phase jump {jump:.3} rad with {samples} samples")]
    Undersampled { jump: f64, samples: usize },

    #[error("winding inconsistent: total/2π = {ratio} is not near an integer")]
    WindingInconsistent { ratio: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
