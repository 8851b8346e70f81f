use super::{check_l, ScoreOptions, ScoreVector};
use crate::graph::{GraphView, NodeId};
use crate::{Error, Result};

/// Dense Path-Union scores.
///
/// `M[u][v] = p_(u,v)` on live arcs. Starting from the identity, each of the
/// `l` rounds sets `PU[i][j] = ⋃_k PU[i][k] · M[k][j]` with
/// `a ∪ b = 1 - (1 - a)(1 - b)`, zeroes the diagonal and adds the row sums to
/// `Δ`. Refuses graphs with more than `opts.dense_cap` nodes.
pub fn path_union_scores(
    view: &GraphView<'_>,
    l: usize,
    opts: &ScoreOptions,
) -> Result<ScoreVector> {
    check_l(l)?;
    let n = view.n();
    if n > opts.dense_cap {
        return Err(Error::DenseCapExceeded {
            n,
            cap: opts.dense_cap,
        });
    }
    let g = view.graph();
    let mut m = vec![vec![0.0f64; n]; n];
    for u in view.live_nodes() {
        for (e, arc) in view.out_arcs(u) {
            m[u.index()][arc.dst.index()] = g.weight(e, opts.weight);
        }
    }
    let mut pu: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    let mut next = vec![vec![0.0f64; n]; n];
    let mut delta = vec![0.0f64; n];
    for _ in 0..l {
        let (cur, m) = (&pu, &m);
        opts.exec.for_each_mut(&mut next, |i, row| {
            for (j, out) in row.iter_mut().enumerate() {
                let miss: f64 = (0..n).map(|k| 1.0 - cur[i][k] * m[k][j]).product();
                *out = if i == j { 0.0 } else { 1.0 - miss };
            }
        });
        std::mem::swap(&mut pu, &mut next);
        for (d, row) in delta.iter_mut().zip(&pu) {
            *d += row.iter().sum::<f64>();
        }
    }
    for v in view.mask().iter() {
        delta[NodeId::index(v)] = 0.0;
    }
    Ok(ScoreVector::new(delta, l, view.mask()))
}
