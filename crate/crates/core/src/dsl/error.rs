use thiserror::Error;

use crate::gridsim::TopologyError;
use crate::model::{Id, ItemKind, SourcePos};

/// A syntax error at a precise location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub pos: SourcePos,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub fn new(pos: SourcePos, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError {
            pos,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: duplicate {kind} id `{id}`")]
    DuplicateId { id: Id, kind: ItemKind, pos: SourcePos },
    #[error("{pos}: missing mandatory field `{name}`")]
    MissingField { name: String, pos: SourcePos },
    #[error("{pos}: {source}")]
    Topology { source: TopologyError, pos: SourcePos },
}

impl DslError {
    pub fn pos(&self) -> &SourcePos {
        match self {
            DslError::Parse(e) => &e.pos,
            DslError::DuplicateId { pos, .. }
            | DslError::MissingField { pos, .. }
            | DslError::Topology { pos, .. } => pos,
        }
    }
}
