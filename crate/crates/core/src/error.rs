use thiserror::Error;

use crate::checker::CheckReport;
use crate::model::TypeKey;
use crate::norelabel::{PlainCycleReport, PlainRejection};
use crate::parametrizer::TemplateFailure;
use crate::vector::{Label, OffspringVector, SupportClass};

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {label} is already zero")]
    CoordinateUnderflow { label: Label },
    #[error("label {label} outside 1..={n}")]
    LabelOutOfRange { label: Label, n: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("type {parent} produces children of type {child}, which has no offspring law")]
    MissingType { parent: TypeKey, child: TypeKey },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("spec has no types")]
    EmptySpec,
    #[error("{mode} mode spec given where the other mode is required")]
    WrongMode { mode: crate::model::Mode },

    #[error("offspring law ({parent},{child}) has no mass at {vector}")]
    MissingNuTerm { parent: Label, child: Label, vector: OffspringVector },
    #[error("existence checks failed: {}", .0.first_failure().unwrap_or("unknown"))]
    ChecksNotPassed(Box<CheckReport>),
    #[error("balance graph is disconnected")]
    DisconnectedBalanceGraph,

    #[error("invalid support template: {0}")]
    InvalidTemplate(TemplateFailure),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("offspring law ({parent},{child}) is referenced but no class of label {child} has a neighbor labeled {parent}")]
    NoAdmissibleTarget { parent: Label, child: Label },
    #[error("root-label ratios are inconsistent")]
    InconsistentRatios,

    #[error("{0}")]
    PlainRejected(PlainRejection),
    #[error("no-relabeling cycle condition fails")]
    PlainCyclesFailed(Box<PlainCycleReport>),

    #[error("graph has {vertices} vertices, above the bound {bound}")]
    GraphTooLarge { vertices: usize, bound: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("labeling is not well defined at label pair ({parent},{child})")]
    IllDefinedLabeling { parent: Label, child: Label },

    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error("{steps} steps would leave a tree truncated at depth {depth}")]
    TruncationExceeded { steps: usize, depth: usize },
    #[error("class {0} is not in the support of the measure")]
    ClassNotInSupport(SupportClass),
    #[error("classes {from} and {to} are not adjacent")]
    NotAdjacentClasses { from: SupportClass, to: SupportClass },

    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
