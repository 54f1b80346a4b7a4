use alloc::string::String;

use thiserror::Error;

use crate::graph::EdgeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("edge ({u}, {v}) has negative weight {w}")]
    NegativeWeight { u: usize, v: usize, w: f64 },
    #[error("edge ({u}, {v}) has a non-finite weight")]
    NonFiniteWeight { u: usize, v: usize },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid weight range [{lo}, {hi})")]
    InvalidWeightRange { lo: f64, hi: f64 },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("inconsistent graph: {0}")]
    Inconsistent(&'static str),
}

/// Contract violations raised by clustering operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("node {0} is absorbed more than once")]
    DuplicateAbsorb(usize),
    #[error("node {node} cannot be absorbed: it is inactive or already in a sampled cluster")]
    InvalidAbsorb { node: usize },
    #[error("host cluster {0} is not sampled")]
    HostNotSampled(usize),
    #[error("attach edge {edge} does not join node {node} to host cluster {host}")]
    BadAttachEdge {
        edge: EdgeId,
        node: usize,
        host: usize,
    },
    #[error("edge {0} is not present in the graph")]
    UnknownEdge(EdgeId),
    #[error("edge {0} lies inside a single cluster or touches an inactive node")]
    InternalEdge(EdgeId),
    #[error("inner clustering does not match the quotient: {0}")]
    Mismatch(&'static str),
    #[error("tree invariant broken at node {node}: {reason}")]
    BrokenTree { node: usize, reason: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpannerError {
    #[error("stretch parameter k must be at least 1")]
    InvalidK,
    #[error("iterations per epoch t must be at least 1")]
    InvalidT,
    #[error("gamma must lie in (0, 1], got {0}")]
    InvalidGamma(f64),
    #[error("unweighted required: the two-phase construction needs unit weights")]
    WeightedInput,
    #[error("repetition count must be at least 1")]
    NoRepetitions,
    #[error("slack constants must be at least 1")]
    InvalidSlack,
    #[error("graph too large for exact all-pairs distances: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}
