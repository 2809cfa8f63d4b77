use thiserror::Error;

use crate::lattice::Coord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("point {point:?} lies outside box {bounds:?}")]
    OutsideBox { point: Vec<Coord>, bounds: Vec<Coord> },

    #[error("box {inner:?} is not contained in {outer:?}")]
    BoxNotContained { inner: Vec<Coord>, outer: Vec<Coord> },

    #[error("box too large: {0}")]
    BoxTooLarge(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid radix {0}: radices must be at least 2")]
    InvalidRadix(u64),

    #[error("digit {digit} at position {position} is out of range for radix {radix}")]
    DigitOutOfRange { position: usize, digit: u64, radix: u64 },

    #[error("{value} is not representable with radices of product {limit}")]
    ValueOutOfRange { value: u64, limit: u64 },

    #[error("not a direct sum on the box: {point:?} has {count} decompositions")]
    NotDirectSum { point: Vec<Coord>, count: u64 },

    #[error("coefficient exceeds 1 at {point:?}")]
    NotBinary { point: Vec<Coord> },

    #[error("not an interval pair: {0}")]
    NotIntervalPair(String),

    #[error("structure violated: {0}")]
    Structure(String),

    #[error("insufficient box at stage {stage}: {detail}")]
    InsufficientBox { stage: String, detail: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("illegal extension: {0}")]
    IllegalExtension(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn insufficient(stage: &str, detail: impl Into<String>) -> Self {
        Error::InsufficientBox {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}
