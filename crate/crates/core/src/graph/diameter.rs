use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Graph, NodeId};
use crate::{Error, Result};

/// Largest finite BFS distance from `src` along out-arcs.
pub fn eccentricity(
    g: &Graph,
    src: NodeId,
    dist: &mut [u32],
    queue: &mut VecDeque<NodeId>,
) -> usize {
    const UNSEEN: u32 = u32::MAX;
    dist.fill(UNSEEN);
    queue.clear();
    dist[src.index()] = 0;
    queue.push_back(src);
    let mut ecc = 0;
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()];
        ecc = ecc.max(d as usize);
        for (_, e) in g.out_arcs(u) {
            if dist[e.dst.index()] == UNSEEN {
                dist[e.dst.index()] = d + 1;
                queue.push_back(e.dst);
            }
        }
    }
    ecc
}

/// Lower bound on the diameter: the maximum eccentricity over `sample_count`
/// distinct sources drawn with `rng_seed` (all nodes when `sample_count ≥ n`).
pub fn diameter_estimate(g: &Graph, sample_count: usize, rng_seed: u64) -> Result<usize> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be ≥ 1".into()));
    }
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    let sources: Vec<usize> = if sample_count >= n {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut s = rand::seq::index::sample(&mut rng, n, sample_count).into_vec();
        s.sort_unstable();
        s
    };
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    Ok(sources
        .into_iter()
        .map(|s| eccentricity(g, NodeId::new(s), &mut dist, &mut queue))
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;

    #[test]
    fn path_of_five() {
        let g = generate::path(&[0.5; 4]).unwrap();
        assert_eq!(diameter_estimate(&g, 5, 0).unwrap(), 4);
    }

    #[test]
    fn four_node_is_two() {
        let g = generate::four_node().graph;
        assert_eq!(diameter_estimate(&g, 4, 0).unwrap(), 2);
    }

    #[test]
    fn empty_and_invalid() {
        assert_eq!(diameter_estimate(&Graph::empty(0), 3, 0).unwrap(), 0);
        assert!(diameter_estimate(&Graph::empty(3), 0, 0).is_err());
    }

    #[test]
    fn exhaustive_matches_floyd_warshall() {
        let g = generate::erdos_renyi(100, 0.1, 8).unwrap();
        // Independent all-pairs oracle.
        let n = g.n();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for e in g.edges() {
            d[e.src.index()][e.dst.index()] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let expect = d
            .iter()
            .flatten()
            .filter(|&&x| x < inf)
            .max()
            .copied()
            .unwrap();
        assert_eq!(diameter_estimate(&g, n, 1).unwrap(), expect);
        assert!(diameter_estimate(&g, 10, 1).unwrap() <= expect);
    }
}
