use thiserror::Error;

/// Which half of a match failed when a rule could not be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Morphism {
    /// The left-hand side could not be embedded in the host.
    Lhs,
    /// The left-hand side embeds, but a forbidden edge is present.
    Nihil,
}

impl std::fmt::Display for Morphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Morphism::Lhs => f.write_str("m_L"),
            Morphism::Nihil => f.write_str("m_K"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MggError {
    #[error("operands live over different node universes")]
    UniverseMismatch,
    #[error("label `{0}` is not part of the node universe")]
    UnknownLabel(String),
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{0}` has no image under the completion mapping")]
    UnmappedLabel(String),
    #[error("completion mapping is not injective: `{0}` is hit twice")]
    NonInjectiveMapping(String),
    #[error("division by zero: the conditioning term has norm 0")]
    DivisionByZero,
    #[error("{what} = {value} is out of range (allowed {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("index range {t0}..={t1} is invalid for a sequence of {len} rules")]
    InvalidRange { t0: usize, t1: usize, len: usize },
    #[error("sequence has {0} rules; at least 2 are required")]
    SequenceTooShort(usize),
    #[error("unsupported permutation; only advancement and delaying are handled")]
    UnsupportedPermutation,
    #[error("invalid match: {0}")]
    InvalidMatch(String),
    #[error("step {step} ({rule}): no match, {morphism} fails")]
    NoMatch {
        step: usize,
        rule: String,
        morphism: Morphism,
    },
    #[error("step {step} ({rule}): match index {index} out of range ({available} available)")]
    SelectorOutOfRange {
        step: usize,
        rule: String,
        index: usize,
        available: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, MggError>;
