use std::collections::BTreeMap;

use thiserror::Error;

/// Failure classes of the pipeline. Each variant maps to one failure kind the
/// command line surfaces through its exit code.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error in `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch loss{}: {reason}", .y.map(|y| format!(" at y = {y:.6}")).unwrap_or_default())]
    BranchLoss { y: Option<f64>, reason: String },

    #[error("no convergence in {stage} after {iterations} iterations (last residuals: {residuals:?})")]
    NoConvergence {
        stage: String,
        iterations: usize,
        residuals: BTreeMap<String, f64>,
    },

    #[error("no sign change of u(1/2) found for C in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("singular transform: min alpha2 = {min_alpha2:e} at y = {y:.6}")]
    SingularTransform { min_alpha2: f64, y: f64 },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("factorization singular at pivot {pivot}")]
    FactorizationSingular { pivot: usize },
}

impl Error {
    pub fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// Short stable name used in CSV rows and reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Domain(_) => "DomainError",
            Error::BranchLoss { .. } => "BranchLoss",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::SingularTransform { .. } => "SingularTransform",
            Error::Assembly(_) => "AssemblyError",
            Error::FactorizationSingular { .. } => "FactorizationSingular",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
