use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value domain mismatch: expected {expected}, found {found}")]
    DomainMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("{what}: n = {n} exceeds the limit of {max} (set PERMATRELLIS_MAX_N to override)")]
    TooLarge { what: &'static str, n: usize, max: usize },

    #[error("{what}: n = {n} is below the minimum of {min}")]
    TooSmall { what: &'static str, n: usize, min: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid trellis: {0}")]
    InvalidTrellis(String),

    #[error("vertex ({level}, {index}) does not exist")]
    NoSuchVertex { level: usize, index: usize },

    #[error("vertices lie in different levels ({0} and {1})")]
    LevelMismatch(usize, usize),

    #[error("a vertex cannot be compared or merged with itself")]
    SameVertex,

    #[error("path enumeration would produce {count} paths, above the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("code has a non-positive-integer coefficient for word {0}")]
    FractionalCode(String),

    #[error("symbol {symbol} is outside the alphabet [1, {size}]")]
    SymbolOutOfRange { symbol: u32, size: usize },

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero")]
    DivisionByZero,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
