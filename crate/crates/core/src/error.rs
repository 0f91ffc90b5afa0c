use std::fmt;

/// Pipeline stage tag attached to errors surfaced by the runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Model,
    LocalSolve,
    CoarseGrain,
    Embed,
    EffectiveSolve,
    Baseline,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Model => "model",
            Stage::LocalSolve => "step1-local-solve",
            Stage::CoarseGrain => "step2-coarse-grain",
            Stage::Embed => "step3-embed",
            Stage::EffectiveSolve => "step3-effective-solve",
            Stage::Baseline => "baseline-ed",
            Stage::Report => "report",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {message} (params: {params:?})")]
    Numeric { message: String, params: Vec<f64> },

    #[error("lanczos failed to converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("operator support outside subsystem: {0}")]
    Support(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("interaction term spans {0} subsystems; at most two are supported")]
    UnsupportedArity(usize),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("term list is not hermitian: {0}")]
    Hermiticity(String),

    #[error("momentum conservation violated: {0}")]
    Momentum(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("[{stage}] {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Stage tag, if the error passed through the pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tag the error of a fallible stage.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
