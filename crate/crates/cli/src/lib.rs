//! Command-line front end: pattern generators, image compiler, simulator,
//! verification and size/time statistics.

use std::io;
use std::path::PathBuf;

use thiserror::Error;
use tileasm_core::generators::GenError;
use tileasm_core::pipeline::CompileError;
use tileasm_core::raster::ImageError;
use tileasm_core::tilefile::TileFileError;
use tileasm_core::SimError;

pub mod args;
pub mod commands;
pub mod stats;

pub use args::{Cli, Command};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const STEP_CAP: i32 = 3;
    pub const NONDETERMINISTIC: i32 = 4;
    pub const VERIFY_FAILED: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", .path.display())]
    TileFile {
        path: PathBuf,
        source: TileFileError,
    },
    #[error("{}: {source}", .path.display())]
    Image { path: PathBuf, source: ImageError },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("step cap of {0} reached before the assembly halted")]
    StepCap(u64),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Image {
                source: ImageError::Png(_),
                ..
            } => exit::IO,
            CliError::Usage(_)
            | CliError::TileFile { .. }
            | CliError::Image { .. }
            | CliError::Compile(_) => exit::USAGE,
            CliError::Sim(SimError::Nondeterministic { .. }) => exit::NONDETERMINISTIC,
            CliError::Sim(SimError::InvalidSystem(_) | SimError::InvalidConfig(_)) => exit::USAGE,
            CliError::Sim(SimError::Model(_)) => exit::IO,
            CliError::StepCap(_) => exit::STEP_CAP,
            CliError::VerifyFailed(_) => exit::VERIFY_FAILED,
        }
    }
}

/// Runs one parsed command line and returns the process exit status.
/// Diagnostics go to stderr.
pub fn execute(cli: Cli) -> i32 {
    match commands::dispatch(cli.command) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("tileasm: {e}");
            e.exit_code()
        }
    }
}
