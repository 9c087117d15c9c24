use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("invalid direction system: {0}")]
    InvalidDirections(String),
    #[error("polygon has empty interior")]
    EmptyInterior,
    #[error("polygon is unbounded")]
    Unbounded,
    #[error("expected {expected} support values, got {got}")]
    SupportCount { expected: usize, got: usize },
    #[error("polygons use different direction systems")]
    DirectionMismatch,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("polygon {id}: {source}")]
    Polygon { id: usize, source: GeomError },
    #[error("generation failed after {0} attempts")]
    GenerationFailed(usize),
    #[error("polygons {0} and {1} intersect")]
    NotIndependent(usize, usize),
    #[error("polygon {0} is not strictly inside the bounding box")]
    OutsideBox(usize),
    #[error("missing grid provenance")]
    MissingProvenance,
    #[error("no charging option meets the bound")]
    BoundViolated,
    #[error("instance too large: {n} > {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("dynamic program budget exceeded")]
    BudgetExceeded,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("partition failed: {0}")]
    Partition(String),
    #[error("no valid cut: {0}")]
    NoValidCut(String),
    #[error("polygon {0} charged twice")]
    ChargeCollision(usize),
    #[error("protected polygon {0} would be lost")]
    LostProtected(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
