//! Sources of randomness for a cascade.
//!
//! The engine never touches an RNG directly; it asks a [`CoinSource`] for each
//! decision, keyed by the arc or node it concerns. Sequential sources
//! ([`StreamCoins`]) answer from a random stream, [`CoinTable`] answers from a
//! pre-sampled table so that different seed sets see the same coin outcomes,
//! and the exact evaluator answers from an enumeration script.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeId, Graph, NodeId};

pub trait CoinSource {
    /// Activation attempt along `edge`, succeeding with probability `p`.
    fn arc_live(&mut self, edge: EdgeId, p: f64) -> bool;

    /// Whether the target adopts the source's orientation (probability `phi`).
    fn arc_agrees(&mut self, edge: EdgeId, phi: f64) -> bool;

    /// Live-edge choice for `node`: index into `weights` (the node's in-arcs in
    /// storage order) with probability `weights[i]`, `None` with the remainder.
    fn live_in_arc(&mut self, node: NodeId, weights: &[f64]) -> Option<usize>;

    /// A fresh `U(0, 1)` activation threshold for `node`.
    fn threshold(&mut self, node: NodeId) -> f64;
}

fn pick(r: f64, weights: &[f64]) -> Option<usize> {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if r < acc {
            return Some(i);
        }
    }
    None
}

/// Two ChaCha streams: one for activation decisions, one for opinion coins.
///
/// Keeping the opinion layer on its own stream means an OI cascade consumes the
/// activation stream exactly like the underlying IC / LT cascade with the same
/// `(seed, stream)`, so the activated sets coincide run by run.
#[derive(Clone, Debug)]
pub struct StreamCoins {
    activation: ChaCha8Rng,
    opinion: ChaCha8Rng,
}

impl StreamCoins {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut activation = ChaCha8Rng::seed_from_u64(seed);
        activation.set_stream(stream.wrapping_mul(2));
        let mut opinion = ChaCha8Rng::seed_from_u64(seed);
        opinion.set_stream(stream.wrapping_mul(2).wrapping_add(1));
        StreamCoins {
            activation,
            opinion,
        }
    }
}

impl CoinSource for StreamCoins {
    #[inline]
    fn arc_live(&mut self, _edge: EdgeId, p: f64) -> bool {
        self.activation.random::<f64>() < p
    }

    #[inline]
    fn arc_agrees(&mut self, _edge: EdgeId, phi: f64) -> bool {
        self.opinion.random::<f64>() < phi
    }

    fn live_in_arc(&mut self, _node: NodeId, weights: &[f64]) -> Option<usize> {
        pick(self.activation.random::<f64>(), weights)
    }

    fn threshold(&mut self, _node: NodeId) -> f64 {
        self.activation.random::<f64>()
    }
}

/// One pre-sampled uniform per arc (activation and interaction) and per node.
///
/// Every query is a pure function of the table, so cascades from different seed
/// sets are coupled: with the table fixed, IC activation is reachability over
/// the arcs whose uniform falls below `p`.
#[derive(Clone, Debug)]
pub struct CoinTable {
    arc: Vec<f64>,
    agree: Vec<f64>,
    node: Vec<f64>,
}

impl CoinTable {
    pub fn sample(g: &Graph, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |k: usize| (0..k).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
        CoinTable {
            arc: draw(g.m()),
            agree: draw(g.m()),
            node: draw(g.n()),
        }
    }
}

impl CoinSource for CoinTable {
    fn arc_live(&mut self, edge: EdgeId, p: f64) -> bool {
        self.arc[edge] < p
    }

    fn arc_agrees(&mut self, edge: EdgeId, phi: f64) -> bool {
        self.agree[edge] < phi
    }

    fn live_in_arc(&mut self, node: NodeId, weights: &[f64]) -> Option<usize> {
        pick(self.node[node.index()], weights)
    }

    fn threshold(&mut self, node: NodeId) -> f64 {
        self.node[node.index()]
    }
}
