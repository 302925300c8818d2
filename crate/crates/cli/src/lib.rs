//! Library half of the `htype-sbo` binary: request assembly, subcommand
//! bodies and the lattice atlas.  Kept separate from `main.rs` so the
//! integration tests can call into it directly.

pub mod atlas;
pub mod commands;
pub mod request;

use serde_json::Value as Json;

/// Exit code 2 for anything the user got wrong, 1 for a check that ran and
/// failed (the report is still printed).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(Json),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<htype_sbo::Error> for CliError {
    fn from(e: htype_sbo::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Failed(_) => f.write_str("check failed"),
        }
    }
}
