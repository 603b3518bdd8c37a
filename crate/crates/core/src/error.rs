use thiserror::Error;

/// Errors raised by the sandpile, bijection, sampling and experiment layers.
///
/// The `Display` output is a single line so that command-line front ends can
/// forward it verbatim.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty region: the lattice region contains no vertices")]
    EmptyRegion,

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("sink is not a valid vertex for this operation")]
    SinkVertex,

    #[error("configuration is unstable at vertex {vertex}: height {height} >= degree {degree}")]
    Unstable { vertex: usize, height: u32, degree: usize },

    #[error("configuration length {got} does not match vertex count {expected}")]
    ConfigLength { expected: usize, got: usize },

    #[error("configuration is not recurrent: {unburnt} vertices never burn")]
    NonRecurrent { unburnt: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("path is not a walk: vertices at positions {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("enumeration budget exceeded: {needed} stable configurations > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("step budget of {0} elementary steps exhausted")]
    StepBudget(u64),

    #[error("regions are not nested: {0}")]
    NotNested(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyRegion => "empty-region",
            Error::UnsupportedDimension { .. } => "unsupported-dimension",
            Error::InvalidAnchor(_) => "invalid-anchor",
            Error::InvalidGraph(_) => "invalid-graph",
            Error::SinkVertex => "sink-vertex",
            Error::Unstable { .. } => "unstable",
            Error::ConfigLength { .. } => "config-length",
            Error::NonRecurrent { .. } => "non-recurrent",
            Error::InvalidTree(_) => "invalid-tree",
            Error::NotAdjacent(..) => "not-adjacent",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::StepBudget(_) => "step-budget",
            Error::NotNested(_) => "not-nested",
            Error::Precondition(_) => "precondition",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
