use thiserror::Error;

/// Broad failure class, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Precondition,
    Invariant,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("arity mismatch: polynomial has {expected} variables, got {got} values")]
    Arity { expected: usize, got: usize },
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has degree 0 in `{0}`")]
    DegreeZero(String),
    #[error("element {0} is not in the set")]
    ElementAbsent(String),
    #[error("duplicate element {0} in strict input")]
    DuplicateElement(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("set sizes differ: {0}, {1}, {2}")]
    UnequalSizes(usize, usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point ({0}, {1}) is not on the curve")]
    OffCurve(String, String),
    #[error("points are not sorted as a monotone piece: {0}")]
    Unsorted(String),
    #[error("forbidden set of size {size} violates capacity S = {capacity}")]
    ForbidCapacity { size: usize, capacity: usize },
    #[error("curve is independent of y after content removal (vertical lines only)")]
    PureVertical,
    #[error("degenerate polynomial: {0}")]
    Degenerate(String),
    #[error("surface is a cylinder (does not depend on `{0}`)")]
    Cylinder(String),
    #[error("z-slice at c = {0} vanishes identically")]
    PlaneFiber(String),
    #[error("grid intersection G is empty")]
    EmptyGrid,
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Syntax { .. } | Error::UnknownVariable(_) => ErrorClass::Parse,
            Error::Invariant(_) => ErrorClass::Invariant,
            Error::Stage { source, .. } => source.class(),
            _ => ErrorClass::Precondition,
        }
    }

    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
