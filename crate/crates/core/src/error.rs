use thiserror::Error;

use crate::graph6::Graph6Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph capacity exceeded: {requested} vertices requested, limit is {limit}")]
    CapacityExceeded { requested: usize, limit: usize },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("{u}{v} is not an edge")]
    NotAnEdge { u: usize, v: usize },

    #[error("class label {label} out of range for {r} classes")]
    LabelOutOfRange { label: usize, r: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("role map inconsistent with graph: {0}")]
    RoleMismatch(String),

    #[error("enumeration refused for n = {n}: limit is {limit}")]
    EnumerationTooLarge { n: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Graph6(#[from] Graph6Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
