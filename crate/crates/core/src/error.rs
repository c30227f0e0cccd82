use thiserror::Error;

pub type Result<T> = std::result::Result<T, NjcError>;

#[derive(Debug, Error)]
pub enum NjcError {
    #[error("frequency omega must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("coupling g must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("decay rate {name} must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("nonlinearity chi must be non-negative, got {0}")]
    NegativeNonlinearity(f64),
    #[error("parameter {0} is not finite")]
    NonFiniteParameter(&'static str),

    #[error("eigenoperator basis is numerically singular (Gram condition number {condition:e})")]
    SingularBasis { condition: f64 },
    #[error("formula requires gamma_plus == gamma_minus, got {gamma_plus} and {gamma_minus}")]
    UnequalRates { gamma_plus: f64, gamma_minus: f64 },
    #[error("formula requires chi == 0, got {0}")]
    NonzeroChi(f64),
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),

    #[error("step dt={dt} too large: dt * spectral bound = {product:.4} exceeds {limit}")]
    StepTooLarge { dt: f64, product: f64, limit: f64 },

    #[error("state is not physical: {0}")]
    NonPhysicalState(String),
    #[error(
        "series too sparse: {points_per_period:.2} points per period, need at least {required}"
    )]
    TooSparse {
        points_per_period: f64,
        required: f64,
    },
    #[error("short-time fit window too long: {0}")]
    WindowTooLong(String),

    #[error("unknown preset `{0}` (expected fig1, fig2, fig3 or fig4)")]
    UnknownPreset(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("sweep grid has {points} points, cap is {cap}")]
    GridTooLarge { points: usize, cap: usize },
    #[error("refusing to serialize non-finite value in `{0}`")]
    NonFiniteOutput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
