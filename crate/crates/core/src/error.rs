use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid interval ({a}, {b}): lower endpoint must be below upper endpoint")]
    InvalidInterval { a: f64, b: f64 },

    #[error("point {x} is not strictly inside ({a}, {b})")]
    OutsideSupport { x: f64, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrand is not finite at abscissa {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },

    #[error("quadrature did not converge: estimate {estimate}, residual error {residual:e}")]
    QuadratureNonConvergence { estimate: f64, residual: f64 },

    #[error("no interior maximum of g* found below l = {limit}")]
    NoInteriorMaximum { limit: f64 },

    #[error("bounded target requires a logit map")]
    MissingTransform,

    #[error("logit map supplied for a target with unbounded support")]
    UnexpectedTransform,

    #[error("logit map ({map_a}, {map_b}) does not match target support ({a}, {b})")]
    SupportMismatch {
        map_a: f64,
        map_b: f64,
        a: f64,
        b: f64,
    },

    #[error("schedule l/(d log d) needs d >= 2, got d = {d}")]
    DegenerateSchedule { d: usize },

    #[error("transformed space requires a target with bounded support")]
    TransformedSpaceUnbounded,

    #[error("trace has no transitions")]
    EmptyTrace,

    #[error("need at least {needed} states, got {found}")]
    TooFewStates { needed: usize, found: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("could not parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("malformed trace file: {0}")]
    TraceFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
