//! Constructions showing that opinion spread is neither monotone nor
//! submodular, and that maximising it is hard to approximate.

use crate::graph::{Graph, GraphBuilder, NodeAttrs, NodeId};
use crate::{Error, Result};

/// `n_x` sources with opinion `+1` and `n_y ≥ 2 n_x` sinks with opinion 0.
/// Source `x_i` reaches `y_(2i-1)` and `y_(2i)` with `p = 1`; every arc has
/// `φ = 1` except the two arcs of the last source, which have `φ = 0`.
#[derive(Clone, Debug)]
pub struct BipartiteFixture {
    pub graph: Graph,
    pub sources: Vec<NodeId>,
    pub sinks: Vec<NodeId>,
}

pub fn bipartite_fixture(n_x: usize, n_y: usize) -> Result<BipartiteFixture> {
    if n_x == 0 || n_y < 2 * n_x {
        return Err(Error::InvalidArgument(format!(
            "bipartite fixture needs n_x ≥ 1 and n_y ≥ 2·n_x, got n_x={n_x}, n_y={n_y}"
        )));
    }
    let mut b = GraphBuilder::new(n_x + n_y);
    let sources: Vec<NodeId> = (0..n_x).map(NodeId::new).collect();
    let sinks: Vec<NodeId> = (n_x..n_x + n_y).map(NodeId::new).collect();
    for &x in &sources {
        b.set_opinion(x, 1.0)?;
    }
    for (i, &x) in sources.iter().enumerate() {
        let phi = if i + 1 == n_x { 0.0 } else { 1.0 };
        b.add_edge(x, sinks[2 * i], 1.0, phi)?;
        b.add_edge(x, sinks[2 * i + 1], 1.0, phi)?;
    }
    Ok(BipartiteFixture {
        graph: b.build(),
        sources,
        sinks,
    })
}

/// Three-layer graph encoding a set-cover instance over `n` elements and
/// `m` subsets: subset nodes `x_j` (opinion 0) point to the element nodes
/// `y_i` (opinion `1/n`) they contain; every `y` points to each of `m + n - 2`
/// nodes `z` (opinion `-1/(2n)`), and every `z` points to a sink `s`
/// (opinion `1/n - 1`). All arcs have `p = φ = w = 1`.
#[derive(Clone, Debug)]
pub struct SetCoverInstance {
    pub graph: Graph,
    pub n_elements: usize,
    pub subsets: Vec<Vec<usize>>,
    /// `x_j` for subset `j`.
    pub subset_nodes: Vec<NodeId>,
    pub element_nodes: Vec<NodeId>,
    pub z_nodes: Vec<NodeId>,
    pub sink: NodeId,
}

impl SetCoverInstance {
    /// Whether the chosen subsets cover every element.
    pub fn covers(&self, chosen: &[usize]) -> bool {
        let mut hit = vec![false; self.n_elements];
        for &j in chosen {
            for &i in &self.subsets[j] {
                hit[i] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// Brute force: does some choice of `k` subsets cover every element?
    pub fn has_cover(&self, k: usize) -> bool {
        k_subsets(self.subsets.len(), k).any(|c| self.covers(&c))
    }

    pub fn seeds_for(&self, chosen: &[usize]) -> Vec<NodeId> {
        chosen.iter().map(|&j| self.subset_nodes[j]).collect()
    }
}

pub fn set_cover_fixture(n_elements: usize, subsets: &[Vec<usize>]) -> Result<SetCoverInstance> {
    let (n, m) = (n_elements, subsets.len());
    if n == 0 || m == 0 || n + m < 3 {
        return Err(Error::InvalidArgument(format!(
            "set-cover fixture needs n ≥ 1, m ≥ 1 and n + m ≥ 3, got n={n}, m={m}"
        )));
    }
    if let Some(bad) = subsets.iter().flatten().find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!(
            "subset element {bad} not in 0..{n}"
        )));
    }
    let n_z = m + n - 2;
    let total = m + n + n_z + 1;
    let subset_nodes: Vec<NodeId> = (0..m).map(NodeId::new).collect();
    let element_nodes: Vec<NodeId> = (m..m + n).map(NodeId::new).collect();
    let z_nodes: Vec<NodeId> = (m + n..m + n + n_z).map(NodeId::new).collect();
    let sink = NodeId::new(total - 1);

    let nf = n as f64;
    let mut b = GraphBuilder::new(total);
    let attrs = |opinion: f64| NodeAttrs {
        opinion,
        theta: 0.5,
    };
    for &y in &element_nodes {
        b.set_attrs(y, attrs(1.0 / nf))?;
    }
    for &z in &z_nodes {
        b.set_attrs(z, attrs(-1.0 / (2.0 * nf)))?;
    }
    b.set_attrs(sink, attrs(1.0 / nf - 1.0))?;
    for (j, set) in subsets.iter().enumerate() {
        for &i in set {
            b.add_weighted_edge(subset_nodes[j], element_nodes[i], 1.0, 1.0, 1.0)?;
        }
    }
    for &y in &element_nodes {
        for &z in &z_nodes {
            b.add_weighted_edge(y, z, 1.0, 1.0, 1.0)?;
        }
    }
    for &z in &z_nodes {
        b.add_weighted_edge(z, sink, 1.0, 1.0, 1.0)?;
    }
    Ok(SetCoverInstance {
        graph: b.build(),
        n_elements: n,
        subsets: subsets.to_vec(),
        subset_nodes,
        element_nodes,
        z_nodes,
        sink,
    })
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().expect("present");
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate() {
        let all: Vec<_> = k_subsets(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(k_subsets(3, 0).count(), 1);
        assert_eq!(k_subsets(2, 3).count(), 0);
    }

    #[test]
    fn bipartite_shape() {
        let f = bipartite_fixture(3, 6).unwrap();
        assert_eq!((f.graph.n(), f.graph.m()), (9, 6));
        let e = f.graph.find_edge(f.sources[2], f.sinks[5]).unwrap();
        assert_eq!(f.graph.edge(e).phi, 0.0);
        assert!(bipartite_fixture(3, 5).is_err());
        assert!(bipartite_fixture(0, 5).is_err());
    }

    #[test]
    fn set_cover_shape() {
        let inst = set_cover_fixture(3, &[vec![0, 1], vec![1, 2], vec![2]]).unwrap();
        assert_eq!(inst.z_nodes.len(), 4);
        assert_eq!(inst.graph.n(), 3 + 3 + 4 + 1);
        assert!(inst.has_cover(2));
        assert!(!inst.has_cover(1));
        assert!(set_cover_fixture(3, &[vec![3]]).is_err());
        assert!(set_cover_fixture(1, &[vec![0]]).is_err());
    }
}
