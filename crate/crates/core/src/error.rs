use thiserror::Error;

use crate::Vertex;

/// Errors reported by the maintainers, estimators and oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("self-loop at vertex {0} is not supported")]
    SelfLoop(Vertex),
    #[error("vertex {vertex} out of range for a universe of {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: u32 },
    #[error("edge {{{0}, {1}}} is not present")]
    MissingEdge(Vertex, Vertex),
    #[error("arc ({0}, {1}) has no oriented copies")]
    EmptyDirection(Vertex, Vertex),
    #[error("invalid hyperedge: {0}")]
    InvalidHyperedge(String),
    #[error("hyperedge {0} is not live")]
    DeadHyperedge(u64),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("{what} = {got} exceeds the enumeration limit {limit}; use the flow oracle")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
