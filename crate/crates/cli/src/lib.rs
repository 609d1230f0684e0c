//! Library surface of the command-line front end; the binary in
//! `main.rs` is a thin wrapper so that integration tests can reuse the
//! config parser and output formats.

pub mod commands;
pub mod config;
pub mod output;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(cylwave::Error),
    EmptyBand,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::EmptyBand => {
                write!(f, "no sweep points left after threshold skipping")
            }
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::EmptyBand => 4,
        }
    }
}
