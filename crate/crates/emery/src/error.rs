//! Error types shared across the crate.

use thiserror::Error;

/// Failure while parsing an expression string.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("power exponent at byte {offset} is not a constant")]
    NonConstantExponent { offset: usize },
}

/// Failure while evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at point {point:?}")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainErrorKind {
    #[error("logarithm of non-positive argument")]
    LogNonPositive,
    #[error("square root of negative argument")]
    SqrtNegative,
    #[error("square root derivative singular at zero")]
    SqrtDerivativeAtZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("fractional power of non-positive base")]
    FractionalPowNonPositive,
    #[error("negative power of zero")]
    ZeroToNegativePow,
}

/// Failure in a geometric operation.
#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("metric is numerically singular at {point:?} (|det| = {det:.3e} < 1e-10)")]
    SingularMetric { point: Vec<f64>, det: f64 },
    #[error("metric signature changes across sample points: {first:?} at {first_point:?} vs {second:?} at {second_point:?}")]
    SignatureChange {
        first: (usize, usize),
        first_point: Vec<f64>,
        second: (usize, usize),
        second_point: Vec<f64>,
    },
    #[error("operation requires chart dimension >= {required}, got {actual}")]
    DimensionTooSmall { required: usize, actual: usize },
    #[error("operation requires a fully periodic chart")]
    NonPeriodicDomain,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Failure while loading a model configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("TOML parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown key `{key}` in section `{section}`")]
    UnknownKey { section: String, key: String },
    #[error("missing required key `{key}` in section `{section}`")]
    MissingKey { section: String, key: String },
    #[error("invalid value for `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("expression error in `{key}`: {source}")]
    Expr {
        key: String,
        #[source]
        source: ParseError,
    },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("io error reading `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
