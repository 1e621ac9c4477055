//! Command implementations behind the `reticulate` binary.
//!
//! Every command returns its report as a string together with the exit code,
//! so the binary only handles argument parsing and I/O.

pub mod commands;
pub mod netfile;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] reticulate_core::Error),
}

/// Exit code for a verdict that does not hold, or an unrealizable matrix.
pub const EXIT_MISMATCH: i32 = 3;
/// Exit code for input and solver errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn new(stdout: String, ok: bool) -> Self {
        Self {
            stdout,
            code: if ok { 0 } else { EXIT_MISMATCH },
        }
    }
}

/// Sizes the global thread pool from `RETICULATE_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RETICULATE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("RETICULATE_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}
