use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("job '{job}': {source}")]
    Job { job: String, source: hardy_core::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn job(job: &str, source: hardy_core::Error) -> Self {
        CliError::Job {
            job: job.to_string(),
            source,
        }
    }
}

/// Errors that mean the request itself is outside a theorem's hypotheses,
/// as opposed to a numerical failure while checking it.
pub fn is_admissibility(e: &hardy_core::Error) -> bool {
    use hardy_core::Error as E;
    matches!(
        e,
        E::ConstraintViolation(_)
            | E::Inadmissible(_)
            | E::NoAdmissibleDelta(_)
            | E::WindowViolation(_)
            | E::IncompatibleNormKind(_)
            | E::BadDelta(_)
            | E::Parse { .. }
            | E::DivergentMoment { .. }
            | E::TooFewSamples(_)
            | E::EmptyWeights
            | E::WeightBelowOne(_)
    )
}
