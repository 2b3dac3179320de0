use thiserror::Error;

/// Every failure the solver can report. `code()` gives a stable,
/// machine-parsable tag used by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid game: {}", .0.join("; "))]
    InvalidGame(Vec<String>),
    #[error("discount factor {0} is not in (0,1)")]
    DeltaOutOfRange(String),
    #[error("empty point list")]
    EmptyInput,
    #[error("invalid weights: {0}")]
    WeightsInvalid(String),
    #[error("direction must be nonnegative and nonzero")]
    BadDirection,
    #[error("x = {0} lies beyond the frontier's right end")]
    OutOfDomain(String),
    #[error("curve map has no entry for state {0}")]
    IncompleteCurveMap(String),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("game is not stopping")]
    NotStopping,
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("the Markov chain induced by the policy does not terminate almost surely")]
    NotStoppingUnderPolicy,
    #[error("valuation violates the betting constraint: {0}")]
    InvalidValuation(String),
    #[error("vertex {0} is not in Eve's winning region")]
    NotWinningVertex(String),
    #[error("Eve cannot force the target from every vertex: {0}")]
    HypothesisViolated(String),
    #[error("adversary broke the rules: {0}")]
    AdamCheated(String),
    #[error("curve relation does not hold: {0}")]
    RelationMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGame(_) => "INVALID_GAME",
            Error::DeltaOutOfRange(_) => "DELTA_OUT_OF_RANGE",
            Error::EmptyInput => "EMPTY_INPUT",
            Error::WeightsInvalid(_) => "WEIGHTS_INVALID",
            Error::BadDirection => "BAD_DIRECTION",
            Error::OutOfDomain(_) => "OUT_OF_DOMAIN",
            Error::IncompleteCurveMap(_) => "INCOMPLETE_CURVE_MAP",
            Error::NonPositiveEpsilon => "NON_POSITIVE_EPSILON",
            Error::NotStopping => "NOT_STOPPING",
            Error::InvalidStrategy(_) => "INVALID_STRATEGY",
            Error::NotStoppingUnderPolicy => "NOT_STOPPING_UNDER_POLICY",
            Error::InvalidValuation(_) => "INVALID_VALUATION",
            Error::NotWinningVertex(_) => "NOT_WINNING_VERTEX",
            Error::HypothesisViolated(_) => "HYPOTHESIS_VIOLATED",
            Error::AdamCheated(_) => "ADAM_CHEATED",
            Error::RelationMismatch(_) => "RELATION_MISMATCH",
            Error::Parse(_) => "PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
