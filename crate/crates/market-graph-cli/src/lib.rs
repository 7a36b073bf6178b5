//! Library side of the `market-graph` command-line tool: experiment
//! configuration, presets, and the subcommand implementations. The binary in
//! `main.rs` is a thin argument-parsing layer over this.

pub mod config;
pub mod experiment;

/// A failed command, classified by exit code: configuration errors exit
/// with 2, data errors with 3, interrupted or partially completed
/// experiments with 4.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Data(String),
    Partial(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Partial(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Data(_) => "data",
            Failure::Partial(_) => "partial",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Partial(m) => m.clone(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error: {}: {}", self.kind(), self.message())
    }
}
