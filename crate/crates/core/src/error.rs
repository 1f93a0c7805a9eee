use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown class {0}")]
    UnknownClass(String),

    #[error("missing label at row {0}")]
    MissingLabel(usize),

    #[error("class '{0}' has no labeled examples")]
    MissingClass(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular to working precision; {0}")]
    Singular(String),

    #[error("numerical failure at iterate {iteration}: {what}")]
    Numerical { iteration: usize, what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is not connected: {0}")]
    Connectivity(String),

    #[error("{0} does not support this operation")]
    Unsupported(String),

    #[error("decision boundary is degenerate (zero weight vector)")]
    DegenerateBoundary,

    #[error("rows of the two datasets do not correspond: {0}")]
    Provenance(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("self-learning iteration {iteration}: {source}")]
    SelfLearning {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
