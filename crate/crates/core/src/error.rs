use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("speed must be strictly positive, got {0}")]
    NonPositiveSpeed(String),
    #[error("instance has no particles on either side")]
    EmptyInstance,
    #[error("side {0} must contain at least one particle")]
    EmptySide(char),
    #[error("invalid instance document: {0}")]
    InvalidDocument(String),
    #[error("duplicate speed {speed} on side {side}")]
    DuplicateSpeed { side: char, speed: String },
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("division by zero")]
    DivisionByZero,
    #[error("series truncation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("series has zero constant term and is not invertible")]
    NotInvertible,
    #[error("epsilon must be strictly positive")]
    NonPositiveEpsilon,
    #[error("epsilon {0} makes perturbed speeds coincide")]
    EpsilonCollision(String),
    #[error("closed form requires one speed group per side, both non-empty")]
    ClosedFormNotApplicable,
    #[error("curve point x = {0} has no positive partner speed")]
    CurveOutOfRange(String),
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("value {0} is not a probability")]
    NotAProbability(String),
}
