use thiserror::Error;

use crate::config::ConfigError;

/// Failure of a subcommand, split by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, flag values or input files.
    #[error("{0}")]
    Validation(String),
    /// A numerical routine or output write failed.
    #[error("{0}")]
    Computation(String),
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_COMPUTATION: i32 = 4;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Computation(_) => "computation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Computation(_) => EXIT_COMPUTATION,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<mwgate::Error> for CliError {
    fn from(e: mwgate::Error) -> Self {
        use mwgate::Error as E;
        match e {
            E::InvalidElement(_) | E::InvalidParameter(_) | E::InvalidArgument(_) | E::Config(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Computation(format!("writing output: {e}"))
    }
}

/// Single-line diagnostic of the form
/// `error kind=<kind> code=<exit> message="<text>"`.
pub fn error_line(kind: &str, code: i32, message: &str) -> String {
    let escaped: String = message
        .trim_end()
        .chars()
        .flat_map(|c| match c {
            '"' => vec!['\\', '"'],
            '\\' => vec!['\\', '\\'],
            '\n' => vec!['\\', 'n'],
            c => vec![c],
        })
        .collect();
    format!("error kind={kind} code={code} message=\"{escaped}\"")
}
