use thiserror::Error;

use crate::qbaf::ArgumentId;
use crate::semantics::StrengthMap;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QbafError {
    #[error("invalid argument id {0:?}: must be non-empty without whitespace or commas")]
    InvalidArgumentId(String),
    #[error("duplicate argument id {0}")]
    DuplicateArgumentId(ArgumentId),
    #[error("edge ({from},{to}) references an unknown argument")]
    UnknownEndpoint { from: ArgumentId, to: ArgumentId },
    #[error("({from},{to}) is declared as both an attack and a support")]
    PolarityConflict { from: ArgumentId, to: ArgumentId },
    #[error("{}", bad_score_message(.argument, .value))]
    BadBaseScore {
        argument: ArgumentId,
        value: Option<f64>,
    },
    #[error("self-loop on {0}")]
    SelfLoop(ArgumentId),
    #[error("unknown argument {0}")]
    UnknownArgument(ArgumentId),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("base scores do not match the argument set (missing {missing:?}, extra {extra:?})")]
    DomainMismatch {
        missing: Vec<ArgumentId>,
        extra: Vec<ArgumentId>,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn bad_score_message(argument: &ArgumentId, value: &Option<f64>) -> String {
    match value {
        Some(v) => format!("base score {v} of {argument} is outside [0,1]"),
        None => format!("missing base score for {argument}"),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error(
        "no convergence after {iterations} iterations: last sup-norm change {last_delta:e} \
         exceeds tolerance {tolerance:e}"
    )]
    NonConvergence {
        iterations: usize,
        tolerance: f64,
        last_delta: f64,
        last_iterate: StrengthMap,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TdnError {
    #[error("report parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("source {source_id} reports both {first:?} and {second:?} for object {object}")]
    InconsistentSource {
        source_id: String,
        object: String,
        first: String,
        second: String,
    },
    #[error("source id {0} collides with a claim id")]
    IdCollision(String),
    #[error("report value {value:?} is not in the domain of object {object}")]
    ValueOutsideDomain { object: String, value: String },
    #[error(transparent)]
    Qbaf(#[from] QbafError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttributionError {
    #[error("unknown argument {0}")]
    UnknownArgument(ArgumentId),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("target {0} is the topic argument itself")]
    TopicEqualsTarget(ArgumentId),
    #[error("{players} players exceed the exact enumeration cap of {cap}; use sampling")]
    TooLargeForExact { players: usize, cap: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("solve failed for {context}: {source}")]
    NonConvergence {
        context: String,
        #[source]
        source: SolveError,
    },
    #[error("target {target}: {source}")]
    Target {
        target: String,
        #[source]
        source: Box<AttributionError>,
    },
}

impl AttributionError {
    /// Strips per-target wrappers.
    pub fn root(&self) -> &AttributionError {
        match self {
            AttributionError::Target { source, .. } => source.root(),
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("report target {0} does not belong to the framework")]
    TargetMismatch(String),
    #[error("negligible threshold must be a finite non-negative number")]
    BadThreshold,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportParseError {
    #[error("explanation parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
