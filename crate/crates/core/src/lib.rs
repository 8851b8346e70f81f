//! Opinion-aware influence maximization.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: the immutable network with per-arc `p`, `w`, `φ` and per-node
//!   opinion / threshold, loaders, parameter schemes, generators and masked views.
//! * [`diffusion`]: one stochastic cascade under IC, WC, LT, live-edge LT and the
//!   two opinion-cum-interaction (OI) variants.
//! * [`spread`]: Monte-Carlo and exact (outcome enumeration) spread evaluation,
//!   plus the counterexample constructions used to pin non-monotonicity.
//! * [`scoring`]: Path-Union, EaSyIM and OSIM score assignment.
//! * [`select`]: score-driven greedy seed selection and the MC marginal-gain greedy.
//!
//! Data-parallel loops go through [`Execution`]; with the `parallel` feature
//! disabled every path runs sequentially and produces identical results.

pub mod diffusion;
mod error;
mod exec;
pub mod graph;
pub mod scoring;
pub mod select;
pub mod spread;

pub use error::{Error, Result};
pub use exec::{pairwise_sum, Execution};
pub use graph::{
    Edge, EdgeId, EdgeWeight, Graph, GraphBuilder, GraphView, NodeAttrs, NodeId, NodeMask,
};
