use pkit_core::Error;
use thiserror::Error as ThisError;

/// Failure of a command, carrying its exit code class.
#[derive(Debug, ThisError)]
pub enum CliError {
    /// Unreadable or invalid input. Exit 1.
    #[error("parse error: {0}")]
    Parse(String),
    /// The computation is undefined for this input (pole, not an eigenvalue, ...). Exit 2.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural requirement of the command is not met. Exit 3.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Fuzzing found failing invariants; the report has already been printed. Exit 4.
    #[error("fuzz: {0} failing checks")]
    FuzzFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::FuzzFailed(_) => 4,
        }
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::GramProductSingular { .. }
            | Error::RequiresBoundedForm
            | Error::NotMinimal { .. }
            | Error::DegenerateSubspace { .. }
            | Error::DegenerateMinimalSubspace { .. }
            | Error::NotInvariant { .. } => CliError::Precondition(msg),
            Error::DimensionMismatch { .. }
            | Error::NotHermitian { .. }
            | Error::SingularGram { .. }
            | Error::RankDeficientBasis { .. }
            | Error::NotSelfAdjoint { .. }
            | Error::InvalidReferencePoint { .. } => CliError::Parse(msg),
            _ => CliError::Domain(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
