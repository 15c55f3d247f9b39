use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input data is malformed or inconsistent.
    Validation,
    /// Input is well-formed but a theorem's hypotheses do not hold for it.
    Hypothesis,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid orbit `{name}`: {reason}")]
    InvalidOrbit { name: String, reason: String },

    #[error("iterate {k} of `{orbit}` exceeds max_iterate {max}")]
    IterateOutOfRange { orbit: String, k: u32, max: u32 },

    #[error("iterate {k} of `{orbit}` is a bad orbit")]
    BadOrbit { orbit: String, k: u32 },

    #[error("invalid curve `{name}`: {reason}")]
    InvalidCurve { name: String, reason: String },

    #[error("inconsistent end profile: {0}")]
    InconsistentProfile(String),

    #[error("base curve `{0}` is not immersed")]
    NotImmersed(String),

    #[error("hypotheses violated: {0}")]
    HypothesesViolated(String),

    #[error("normal Chern number is not an integer: 2c_N = {0}")]
    OddChern(i64),

    #[error("degree {degree} exceeds the enumeration bound {max}")]
    DegreeTooLarge { degree: u32, max: u32 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("registry mismatch: {0}")]
    RegistryMismatch(String),

    #[error("degree mismatch for {variable}: expected {expected}, found {found}")]
    DegreeMismatch {
        variable: String,
        expected: i64,
        found: String,
    },

    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),

    #[error("inadmissible key: {0}")]
    InadmissibleKey(String),

    #[error("no formal solution: {0}")]
    NoFormalSolution(String),

    #[error("side conflict: {0}")]
    SideConflict(String),

    #[error("odd potential: {0}")]
    OddPotential(String),

    #[error("composition is not associative up to truncation: {0}")]
    AssociativityViolation(String),

    #[error("not an exceptional sphere: {0}")]
    NotExceptional(String),

    #[error("pipeline hypothesis failed: {0}")]
    PipelineHypothesis(String),

    #[error("orbit `{0}` is not elliptic")]
    NotElliptic(String),

    #[error("breaking orbits are not all Morse: {0}")]
    NotMorse(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidOrbit { .. } => "INVALID_ORBIT",
            Error::IterateOutOfRange { .. } => "ITERATE_OUT_OF_RANGE",
            Error::BadOrbit { .. } => "BAD_ORBIT",
            Error::InvalidCurve { .. } => "INVALID_CURVE",
            Error::InconsistentProfile(_) => "INCONSISTENT_PROFILE",
            Error::NotImmersed(_) => "NOT_IMMERSED",
            Error::HypothesesViolated(_) => "HYPOTHESES_VIOLATED",
            Error::OddChern(_) => "ODD_CHERN",
            Error::DegreeTooLarge { .. } => "DEGREE_TOO_LARGE",
            Error::InvalidPartition(_) => "INVALID_PARTITION",
            Error::RegistryMismatch(_) => "REGISTRY_MISMATCH",
            Error::DegreeMismatch { .. } => "DEGREE_MISMATCH",
            Error::TruncationOverflow(_) => "TRUNCATION_OVERFLOW",
            Error::InadmissibleKey(_) => "INADMISSIBLE_KEY",
            Error::NoFormalSolution(_) => "NO_FORMAL_SOLUTION",
            Error::SideConflict(_) => "SIDE_CONFLICT",
            Error::OddPotential(_) => "ODD_POTENTIAL",
            Error::AssociativityViolation(_) => "ASSOCIATIVITY_VIOLATION",
            Error::NotExceptional(_) => "NOT_EXCEPTIONAL",
            Error::PipelineHypothesis(_) => "PIPELINE_HYPOTHESIS",
            Error::NotElliptic(_) => "NOT_ELLIPTIC",
            Error::NotMorse(_) => "NOT_MORSE",
            Error::UnknownName { .. } => "UNKNOWN_NAME",
            Error::Parse(_) => "PARSE",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::HypothesesViolated(_)
            | Error::NotImmersed(_)
            | Error::NoFormalSolution(_)
            | Error::NotExceptional(_)
            | Error::PipelineHypothesis(_)
            | Error::NotElliptic(_)
            | Error::NotMorse(_) => ErrorClass::Hypothesis,
            _ => ErrorClass::Validation,
        }
    }
}
