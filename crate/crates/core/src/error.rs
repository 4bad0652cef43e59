use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node index {index} out of range for a graph with {num_nodes} nodes")]
    NodeOutOfRange { index: usize, num_nodes: usize },

    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(usize),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("no connected sample after {attempts} attempts")]
    ResampleBudgetExhausted { attempts: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("nonzero diagonal entry at {0}")]
    NonZeroDiagonal(usize),

    #[error("signal row for node {node} has zero norm")]
    ZeroRow { node: usize },

    #[error("stratum K={stratum} has no edges; its line graph is undefined")]
    EmptyStratum { stratum: usize },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("non-finite value at epoch {epoch}")]
    NonFinite { epoch: usize },

    #[error("learning failed after {attempts} attempts")]
    LearningFailed { attempts: usize },

    #[error("all ensemble weights are zero")]
    AllZeroWeights,

    #[error("comparison undefined: both magnitude vectors are zero")]
    UndefinedComparison,

    #[error("correlation undefined: zero variance")]
    ZeroVariance,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}
