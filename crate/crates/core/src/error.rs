use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// A loaded value violates a data-model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error(
        "argument component {component} has a stance tie ({favour} favour / {against} against)"
    )]
    StanceTie {
        component: usize,
        favour: usize,
        against: usize,
    },

    #[error("unknown argument id {0}")]
    UnknownArgument(usize),

    /// Enumeration exceeded the configured extension count or wall-clock budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("missing embedding for {0}")]
    MissingEmbedding(String),

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An error raised inside a named pipeline stage. The display shows the
    /// stage only; the cause is reachable through `source()`.
    #[error("{stage}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(stage: impl Into<String>) -> impl FnOnce(Error) -> Error {
        let stage = stage.into();
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, with stage labels peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors that stem from malformed or invariant-violating input data.
    pub fn is_validation(&self) -> bool {
        matches!(
            self.root(),
            Error::Parse(_)
                | Error::Validation(_)
                | Error::StanceTie { .. }
                | Error::UnknownArgument(_)
                | Error::MissingEmbedding(_)
                | Error::DimensionMismatch { .. }
                | Error::NonFinite(_)
        )
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self.root(), Error::ResourceLimit(_))
    }
}
