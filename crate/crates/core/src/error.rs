use std::path::PathBuf;

use thiserror::Error;

use crate::hilbert::Outcome;
use crate::lattice::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("corrupted surface front: {0}")]
    CorruptFront(String),

    #[error("vertex {vertex} is not ready on the current front")]
    NotReady { vertex: VertexId },

    /// A replayed or driven outcome has zero probability in the state it is applied to.
    #[error("impossible outcome {outcome}{}{}", vertex_suffix(*.vertex), step_suffix(*.step))]
    ImpossibleOutcome {
        vertex: Option<VertexId>,
        outcome: Outcome,
        step: Option<usize>,
    },

    #[error("states live on lattices of different width: {expected} vs {found} vertices")]
    GeometryMismatch { expected: usize, found: usize },

    #[error("config error{}: {message}", location(*.line, .key.as_deref()))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("malformed {kind} file {}: {message}", .path.display())]
    Format {
        kind: &'static str,
        path: PathBuf,
        message: String,
    },

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            key: key.map(str::to_owned),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches vertex and step context to an impossible-outcome error.
    pub(crate) fn at(self, v: VertexId, n: Option<usize>) -> Self {
        match self {
            Error::ImpossibleOutcome { outcome, step, .. } => Error::ImpossibleOutcome {
                vertex: Some(v),
                outcome,
                step: n.or(step),
            },
            other => other,
        }
    }
}

fn vertex_suffix(vertex: Option<VertexId>) -> String {
    vertex.map(|v| format!(" at vertex {v}")).unwrap_or_default()
}

fn step_suffix(step: Option<usize>) -> String {
    step.map(|n| format!(" (step {n})")).unwrap_or_default()
}

fn location(line: Option<usize>, key: Option<&str>) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!(" at line {l}, key `{k}`"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(k)) => format!(" for key `{k}`"),
        (None, None) => String::new(),
    }
}
