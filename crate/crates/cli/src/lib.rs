//! Library side of the `scsim` command-line tool: configuration, input
//! loading, report writing, and the subcommand implementations. The binary
//! in `main.rs` only parses arguments and dispatches here.

pub mod commands;
pub mod config;
pub mod inputs;
pub mod report;

use scsim_core::annotations::AnnotationError;
use scsim_core::generator::GeneratorError;
use scsim_core::mapping::MappingError;
use scsim_core::metrics::MetricsError;
use scsim_core::simulator::{KbError, SimulatorError};

/// Exit codes: 2 validation, 3 protocol violation (and checker failures),
/// 4 I/O.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Protocol(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Protocol(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Protocol(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<AnnotationError> for CliError {
    fn from(e: AnnotationError) -> Self {
        match e {
            AnnotationError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MappingError> for CliError {
    fn from(e: MappingError) -> Self {
        match e {
            MappingError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<GeneratorError> for CliError {
    fn from(e: GeneratorError) -> Self {
        match e {
            GeneratorError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<KbError> for CliError {
    fn from(e: KbError) -> Self {
        match e {
            KbError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SimulatorError> for CliError {
    fn from(e: SimulatorError) -> Self {
        match e {
            SimulatorError::Io(inner) => CliError::Io(inner.to_string()),
            SimulatorError::Protocol { .. } | SimulatorError::Checker(_) => {
                CliError::Protocol(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Validation(e.to_string())
    }
}
