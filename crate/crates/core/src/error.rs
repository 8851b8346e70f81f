use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(String),

    #[error("node {node} is out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("seed set is empty")]
    EmptySeedSet,

    #[error("unknown diffusion model `{0}`")]
    UnknownModel(String),

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("same-step activator list is empty")]
    EmptyActivatorSet,

    #[error("exact evaluation needs 2^{required:.2} outcomes, budget is 2^{budget}")]
    OracleBudgetExceeded { required: f64, budget: u32 },

    #[error("dense Path-Union matrix refused: {n} nodes exceeds the cap of {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("asked for {k} seeds but only {live} nodes are selectable")]
    NotEnoughNodes { k: usize, live: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
