use thiserror::Error;

use svcsplit::agent::AgentError;
use svcsplit::env::EnvError;
use svcsplit::oracle::OracleError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input files.
    #[error("{0}")]
    Input(String),
    /// Invalid flags or hyperparameters.
    #[error("{0}")]
    Config(String),
    #[error("decomposition does not match the graph's methods: {0}")]
    MethodSetMismatch(MethodSetMismatch),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MethodSetMismatch {
    /// Graph methods the decomposition does not place.
    pub missing: Vec<String>,
    /// Decomposition entries that are not graph methods (or classes with no methods).
    pub extra: Vec<String>,
    /// Methods placed in more than one service.
    pub duplicated: Vec<String>,
}

impl MethodSetMismatch {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.duplicated.is_empty()
    }
}

impl std::fmt::Display for MethodSetMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (label, items) in [("missing", &self.missing), ("unknown", &self.extra), ("duplicated", &self.duplicated)] {
            if !items.is_empty() {
                parts.push(format!("{label}: {}", items.join(", ")));
            }
        }
        f.write_str(&parts.join("; "))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Internal(_) => 1,
            Self::Input(_) | Self::MethodSetMismatch(_) => 2,
            Self::Config(_) => 3,
        }
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::InvalidConfig(_) | EnvError::BadObjective(_) => Self::Config(e.to_string()),
            EnvError::GraphEnvMismatch { .. } => Self::Input(e.to_string()),
            other => Self::Internal(other.into()),
        }
    }
}

impl From<AgentError> for CliError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::InvalidConfig(_) => Self::Config(e.to_string()),
            AgentError::Env(env) => env.into(),
            AgentError::Checkpoint(_) => Self::Input(e.to_string()),
            other => Self::Internal(other.into()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } | OracleError::InvalidConfig(_) => Self::Config(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 3);
        assert_eq!(CliError::Internal(anyhow::anyhow!("x")).exit_code(), 1);
        assert_eq!(CliError::from(OracleError::TooLarge { n: 50, cap: 10 }).exit_code(), 3);
        assert_eq!(CliError::from(AgentError::EmptyBuffer).exit_code(), 1);
    }

    #[test]
    fn mismatch_message_lists_methods() {
        let m = MethodSetMismatch { missing: vec!["A.a()".into()], extra: vec!["Z.z()".into()], duplicated: vec![] };
        assert_eq!(m.to_string(), "missing: A.a(); unknown: Z.z()");
    }
}
