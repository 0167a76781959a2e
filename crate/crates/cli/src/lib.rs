//! Batch front end for `torsionfree-core`: JSON problem files in, JSON
//! reports and text summaries out.

pub mod problem;
pub mod report;
pub mod run;
pub mod summary;

pub use problem::{parse_preset, Checks, OdeSettings, Preset, ProblemSpec};
pub use report::{SolveReportFile, Status};
pub use run::run;
pub use summary::render_summary;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] torsionfree_core::Error),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Field { field: field.into(), message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Field { .. } => "field",
            CliError::Io { .. } => "io",
            CliError::Core(torsionfree_core::Error::NotInK { .. }) => "not-in-k",
            CliError::Core(_) => "solver",
            CliError::Invalid(_) => "invalid",
        }
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            CliError::Core(torsionfree_core::Error::NotInK { residual }) => Some(*residual),
            CliError::Core(torsionfree_core::Error::Precondition { residual, .. }) => Some(*residual),
            _ => None,
        }
    }
}
