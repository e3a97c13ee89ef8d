use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field: {0}")]
    Field(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("unsupported coefficient domain: {0}")]
    UnsupportedDomain(String),

    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("decomposition incomplete: {0}")]
    DecompositionIncomplete(String),

    #[error("undecided at configured bound: {0}")]
    Undecided(String),

    #[error("presentation insufficient: {0}")]
    PresentationInsufficient(String),

    #[error("enumeration budget exceeded: need {needed} evaluations, budget {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("point is not in the etale locus: {0}")]
    NonEtale(String),

    #[error("lift not found: {0}")]
    LiftNotFound(String),

    #[error("no group element maps the source point to the target")]
    NoElement,

    #[error("several group elements map the source point to the target")]
    NonUnique,

    #[error("unsupported case at stage `{stage}`: {detail}")]
    Unsupported { stage: String, detail: String },

    #[error("schema error at {pointer}: {msg}")]
    Schema { pointer: String, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn unsupported(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Unsupported { stage: stage.into(), detail: detail.into() }
    }

    pub fn schema(pointer: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema { pointer: pointer.into(), msg: msg.into() }
    }

    /// Short stage label used in serialized error objects.
    pub fn stage(&self) -> &str {
        match self {
            Error::Field(_) | Error::UnsupportedDomain(_) => "field",
            Error::Parse { .. } => "parse",
            Error::VariableMismatch(_) => "ring",
            Error::ZeroPolynomial => "factor",
            Error::DecompositionIncomplete(_) => "decompose",
            Error::Undecided(_) => "geometric-integrality",
            Error::PresentationInsufficient(_) => "relative-closure",
            Error::Budget { .. } => "budget",
            Error::Validation(_) => "validate",
            Error::NonEtale(_) | Error::LiftNotFound(_) => "local-frobenius",
            Error::NoElement | Error::NonUnique => "group-element",
            Error::Unsupported { stage, .. } => stage,
            Error::Schema { .. } => "schema",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
