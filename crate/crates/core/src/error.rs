use std::io;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("requested sequence length is zero")]
    EmptySequence,
    #[error("invalid source: {0}")]
    InvalidSource(String),
    #[error("precision guard: {0}")]
    Precision(String),
    #[error("out of range: {0}")]
    Bounds(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("markov chain has no unique stationary distribution: {0}")]
    NonErgodic(String),
    #[error("continued fraction depth {0} exceeds the limit of 64")]
    Depth(usize),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("corrupt stream: {0}")]
    Corrupt(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Process exit code for the command-line tool.
    ///
    /// 2 = configuration or argument error, 3 = precision or resource guard,
    /// 4 = internal invariant violation, 1 = I/O failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::EmptySequence
            | LabError::InvalidSource(_)
            | LabError::Bounds(_)
            | LabError::InvalidArgument(_)
            | LabError::NonErgodic(_)
            | LabError::Config(_) => 2,
            LabError::Precision(_) | LabError::Depth(_) | LabError::Overflow(_) | LabError::Refused(_) => 3,
            LabError::Corrupt(_) | LabError::Invariant(_) => 4,
            LabError::Io(_) | LabError::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
