use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown element {0}")]
    UnknownElement(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} has size {size}, which exceeds the cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("refusing to enumerate an estimated {estimate} candidate replacements (cap {cap})")]
    CapRefusal { estimate: u128, cap: u128 },

    #[error("degenerate instance: best singleton has value 0")]
    Degenerate,

    #[error("arithmetic overflow in exact rational evaluation")]
    Overflow,

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("audit failure: {0}")]
    Audit(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Semantic(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::UnknownElement(_) => "unknown_element",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::SizeCap { .. } => "size_cap",
            Error::CapRefusal { .. } => "cap_refusal",
            Error::Degenerate => "degenerate",
            Error::Overflow => "overflow",
            Error::Invariant(_) => "invariant",
            Error::Audit(_) => "audit",
            Error::Syntax { .. } => "syntax",
            Error::Semantic(_) => "semantic",
            Error::Io(_) => "io",
        }
    }
}
