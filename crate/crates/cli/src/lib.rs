//! Frontend for `minsurf`: argument handling, the verification suite and JSON
//! reports. The `minsurf` binary is a thin wrapper over [`run`].

pub mod args;
pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::{Command, Format, RunConfig, Surface};
pub use error::CliError;
pub use report::{Check, Report};

/// Runs one command. Returns the report; the caller maps a failed report to
/// exit code 1.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Generate => commands::generate(cfg),
        Command::Verify => commands::verify(cfg),
        Command::Kdv => commands::kdv(cfg),
    }
}
