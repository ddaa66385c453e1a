//! CLI error taxonomy and the process exit codes attached to it.

use std::fmt;

/// What went wrong, sorted by exit code: validation problems exit 2,
/// numerical failures exit 3.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable input, schema violations, unknown model tags, semantic
    /// validation failures. Paths into the offending JSON use pointer
    /// syntax ("/network/power_law/mean_k").
    Validation(String),
    /// The requested computation failed numerically (solver breakdown,
    /// divergence, no certificate).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Map core errors onto the CLI taxonomy: contract violations are
/// validation, solver failures are numerical.
impl From<swarm_core::Error> for CliError {
    fn from(e: swarm_core::Error) -> Self {
        use swarm_core::Error as E;
        match e {
            E::StepUnderflow { .. }
            | E::NonFiniteState { .. }
            | E::StepRejected { .. }
            | E::NoCertificate { .. }
            | E::SameSignPredicate
            | E::NonInvertible => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("io: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
