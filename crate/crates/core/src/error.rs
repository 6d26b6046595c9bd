use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("resampling failed: {0}")]
    Resampling(String),

    #[error("incompatible grids: F = {left} vs F = {right}")]
    IncompatibleGrid { left: usize, right: usize },

    #[error("shape is not repairable: {remaining} intersection(s) left after {passes} passes")]
    NonRepairable { passes: usize, remaining: usize },

    #[error("degenerate weights: |sum| = {sum:e} is below the normalization floor")]
    DegenerateWeights { sum: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("shape generation failed: {0}")]
    GenerationFailure(String),

    #[error("aerodynamic evaluation failed: {0}")]
    EvaluationFailure(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
