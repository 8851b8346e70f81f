//! Synthetic graphs: the four-node running example, Erdős–Rényi digraphs,
//! trees, and the random trees / DAGs / paths used by the exactness checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::io::{IdMap, DEFAULT_P, DEFAULT_PHI};
use super::{Graph, GraphBuilder, NodeAttrs, NodeId};
use crate::{Error, Result};

/// A generated graph with printable node labels.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub graph: Graph,
    pub ids: IdMap,
}

impl Fixture {
    pub fn unlabeled(graph: Graph) -> Self {
        let ids = IdMap::identity(graph.n());
        Fixture { graph, ids }
    }

    pub fn node(&self, label: &str) -> NodeId {
        self.ids
            .lookup(label)
            .unwrap_or_else(|| panic!("fixture has no node `{label}`"))
    }
}

/// The four-node network: B→A, B→C, A→D, C→D with
/// `p = 0.1, 0.1, 0.8, 0.9`, `φ = 0.7, 0.8, 0.9, 0.1` and opinions
/// `o_A = 0.8, o_B = 0, o_C = 0.6, o_D = -0.3`. Dense ids are A=0, B=1, C=2, D=3.
pub fn four_node() -> Fixture {
    let ids = IdMap::from_labels(["A", "B", "C", "D"].map(String::from).to_vec());
    let (a, b, c, d) = (NodeId(0), NodeId(1), NodeId(2), NodeId(3));
    let mut g = GraphBuilder::new(4);
    for (v, o) in [(a, 0.8), (b, 0.0), (c, 0.6), (d, -0.3)] {
        g.set_opinion(v, o).expect("valid opinion");
    }
    for (s, t, p, phi) in [
        (b, a, 0.1, 0.7),
        (b, c, 0.1, 0.8),
        (a, d, 0.8, 0.9),
        (c, d, 0.9, 0.1),
    ] {
        g.add_edge(s, t, p, phi).expect("valid arc");
    }
    Fixture {
        graph: g.build(),
        ids,
    }
}

/// Directed `G(n, q)`: every ordered pair `u ≠ v` is an arc with probability
/// `q`, sampled by geometric skipping. Arcs carry `p = 0.1`, `φ = 1`.
pub fn erdos_renyi(n: usize, q: f64, seed: u64) -> Result<Graph> {
    super::check_unit("q", q, 0.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    if n < 2 || q == 0.0 {
        return Ok(b.build());
    }
    let slots = (n as u64) * (n as u64 - 1);
    let push = |b: &mut GraphBuilder, k: u64| {
        let u = (k / (n as u64 - 1)) as usize;
        let mut v = (k % (n as u64 - 1)) as usize;
        if v >= u {
            v += 1;
        }
        b.add_edge(NodeId::new(u), NodeId::new(v), DEFAULT_P, DEFAULT_PHI)
            .expect("generated arc is valid");
    };
    if q >= 1.0 {
        (0..slots).for_each(|k| push(&mut b, k));
        return Ok(b.build());
    }
    let log_q = (1.0 - q).ln();
    let mut k: u64 = 0;
    loop {
        let r: f64 = 1.0 - rng.random::<f64>();
        let skip = (r.ln() / log_q).floor();
        if !skip.is_finite() || skip >= (slots - k) as f64 {
            break;
        }
        k += skip as u64;
        push(&mut b, k);
        k += 1;
        if k >= slots {
            break;
        }
    }
    Ok(b.build())
}

/// Directed `G(n, m)`: exactly `m` distinct arcs drawn uniformly.
pub fn erdos_renyi_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let slots = n.saturating_mul(n.saturating_sub(1));
    if m > slots {
        return Err(Error::InvalidArgument(format!(
            "{m} arcs do not fit in a simple digraph on {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    let mut added = 0;
    while added < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && b.add_edge(NodeId::new(u), NodeId::new(v), DEFAULT_P, DEFAULT_PHI)? {
            added += 1;
        }
    }
    Ok(b.build())
}

/// Center 0 with arcs to `1..=leaves`.
pub fn star(leaves: usize, p: f64) -> Graph {
    let mut b = GraphBuilder::new(leaves + 1);
    for v in 1..=leaves {
        b.add_edge(NodeId(0), NodeId::new(v), p, DEFAULT_PHI)
            .expect("valid arc");
    }
    b.build()
}

/// Directed path `0 → 1 → … → len` with the given arc probabilities.
pub fn path(probs: &[f64]) -> Result<Graph> {
    let mut b = GraphBuilder::new(probs.len() + 1);
    for (i, &p) in probs.iter().enumerate() {
        b.add_edge(NodeId::new(i), NodeId::new(i + 1), p, DEFAULT_PHI)?;
    }
    Ok(b.build())
}

/// Complete out-tree of the given depth; depth 0 is a single node.
pub fn complete_tree(depth: usize, branching: usize, p: f64) -> Result<Graph> {
    if branching == 0 && depth > 0 {
        return Err(Error::InvalidArgument("tree branching must be ≥ 1".into()));
    }
    let mut n = 1usize;
    let mut level = 1usize;
    for _ in 0..depth {
        level = level
            .checked_mul(branching)
            .ok_or_else(|| Error::InvalidArgument("tree too large".into()))?;
        n = n
            .checked_add(level)
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidArgument("tree too large".into()))?;
    }
    let mut b = GraphBuilder::new(n);
    // Breadth-first numbering: children of i are i*b+1 ..= i*b+b.
    for child in 1..n {
        let parent = (child - 1) / branching;
        b.add_edge(NodeId::new(parent), NodeId::new(child), p, DEFAULT_PHI)?;
    }
    Ok(b.build())
}

fn random_attrs(rng: &mut ChaCha8Rng) -> NodeAttrs {
    NodeAttrs {
        opinion: rng.random_range(-1.0..=1.0),
        theta: rng.random::<f64>(),
    }
}

/// Random recursive out-tree rooted at 0: node `i` hangs below a uniform
/// earlier node. `p ~ U[0.1, 0.9]`, `φ ~ U[0, 1]`, `o ~ U[-1, 1]`.
pub fn random_out_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    for v in 0..n {
        b.set_attrs(NodeId::new(v), random_attrs(&mut rng))
            .expect("in range");
    }
    for v in 1..n {
        let parent = rng.random_range(0..v);
        let p = rng.random_range(0.1..=0.9);
        let phi = rng.random::<f64>();
        b.add_edge(NodeId::new(parent), NodeId::new(v), p, phi)
            .expect("tree arc");
    }
    b.build()
}

/// Random DAG over the index order: `i → j` (i < j) with probability `density`.
/// LT weights are random with every in-weight sum drawn below 1.
pub fn random_dag(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    for v in 0..n {
        b.set_attrs(NodeId::new(v), random_attrs(&mut rng))
            .expect("in range");
    }
    for j in 1..n {
        let parents: Vec<usize> = (0..j).filter(|_| rng.random::<f64>() < density).collect();
        let raw: Vec<f64> = parents
            .iter()
            .map(|_| rng.random_range(0.05..1.0))
            .collect();
        let total: f64 = raw.iter().sum();
        let budget = rng.random_range(0.3..1.0);
        for (&i, r) in parents.iter().zip(&raw) {
            let p = rng.random_range(0.1..=0.9);
            let phi = rng.random::<f64>();
            b.add_weighted_edge(NodeId::new(i), NodeId::new(j), p, phi, r / total * budget)
                .expect("dag arc");
        }
    }
    b.build()
}

/// Random path `0 → … → len`: `p ~ U[0.05, 1]`, `φ ~ U[0, 1]`, `o ~ U[-1, 1]`.
pub fn random_path(len: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(len + 1);
    for v in 0..=len {
        b.set_attrs(NodeId::new(v), random_attrs(&mut rng))
            .expect("in range");
    }
    for i in 0..len {
        let p = rng.random_range(0.05..=1.0);
        let phi = rng.random::<f64>();
        b.add_edge(NodeId::new(i), NodeId::new(i + 1), p, phi)
            .expect("path arc");
    }
    b.build()
}

/// Longest forward distance from `root` in an acyclic graph.
pub fn depth_from(g: &Graph, root: NodeId) -> usize {
    fn go(g: &Graph, u: NodeId) -> usize {
        g.out_arcs(u)
            .map(|(_, e)| 1 + go(g, e.dst))
            .max()
            .unwrap_or(0)
    }
    go(g, root)
}
