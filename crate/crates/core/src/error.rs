use thiserror::Error;

use crate::groupoid::ElementId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),

    #[error("invalid action at group element {group_element}, point {point}: {reason}")]
    InvalidAction {
        group_element: usize,
        point: usize,
        reason: String,
    },

    #[error("malformed groupoid table: {0}")]
    MalformedGroupoid(String),

    #[error("groupoid fails {count} axiom check(s); first: {first}")]
    AxiomViolation { count: usize, first: String },

    #[error("arguments are not composable: {0}")]
    NotComposable(String),

    #[error("cochain is not normalized at {tuple:?}")]
    NotNormalized { tuple: Vec<ElementId> },

    #[error("unsupported cochain arity {0}")]
    UnsupportedArity(usize),

    #[error("invalid measure family: {0}")]
    InvalidMeasure(String),

    #[error("measure is not fully supported: zero weight at arrow {0}")]
    NotFullSupport(ElementId),

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("level {level} is outside 1..={max}")]
    InvalidLevel { level: usize, max: usize },

    #[error("basis dimension {dimension} exceeds the cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    #[error("search space of size {size} exceeds the cap {cap}")]
    SearchCap { size: u128, cap: u128 },

    #[error("invalid coefficient bundle: {0}")]
    InvalidBundle(String),

    #[error("invalid characteristic data: {0}")]
    InvalidCharacteristic(String),

    #[error("inconsistent characteristic data: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
