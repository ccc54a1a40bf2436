use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("relation {relation} has arity {expected} but tuple {tuple} has length {found}")]
    Arity {
        relation: String,
        expected: usize,
        found: usize,
        tuple: String,
    },

    #[error("element {0:?} is not in the universe")]
    DanglingElement(String),

    #[error("constant {0} is not interpreted")]
    UninterpretedConstant(String),

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("structures have different vocabularies")]
    VocabularyMismatch,

    #[error("morphisms are not parallel")]
    NotParallel,

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("{0}")]
    Malformed(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("variable {name} shadows an enclosing binder (offset {offset})")]
    Shadowing { name: String, offset: usize },

    #[error("free variable {0} has no value")]
    UnboundVariable(String),

    #[error("formula is not primitive-positive")]
    NotPrimitivePositive,

    #[error("formula is not a sentence: free variable {0}")]
    NotASentence(String),

    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("equalizer does not exist: constant {0} lies outside the agreement set")]
    NoEqualizer(String),

    #[error("constant {0} lies outside the neighborhood ball")]
    ConstantOutsideBall(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error stems from an exhausted budget or cap rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::CapExceeded(_))
    }
}
