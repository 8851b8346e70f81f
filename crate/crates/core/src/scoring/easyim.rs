use super::{check_l, ScoreOptions, ScoreVector};
use crate::graph::{GraphView, NodeId};
use crate::Result;

/// `Δⁱ(u) = Σ_{v ∈ Out(u)} p_(u,v) (1 + Δⁱ⁻¹(v))` for `i = 1..=l`, `Δ⁰ ≡ 0`.
///
/// `O(l (m + n))` time; two per-node buffers swapped between levels.
pub fn easyim_scores(view: &GraphView<'_>, l: usize, opts: &ScoreOptions) -> Result<ScoreVector> {
    check_l(l)?;
    let g = view.graph();
    let n = view.n();
    let mut prev = vec![0.0f64; n];
    let mut cur = vec![0.0f64; n];
    for _ in 0..l {
        let last = &prev;
        opts.exec.for_each_mut(&mut cur, |u, slot| {
            let u = NodeId::new(u);
            *slot = view
                .out_arcs(u)
                .map(|(e, arc)| g.weight(e, opts.weight) * (1.0 + last[arc.dst.index()]))
                .sum();
        });
        std::mem::swap(&mut prev, &mut cur);
    }
    drop(cur);
    Ok(ScoreVector::new(prev, l, view.mask()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, masked_view, NodeMask};
    use crate::Execution;

    #[test]
    fn three_node_path() {
        let g = generate::path(&[0.5, 0.5]).unwrap();
        let s = easyim_scores(&g.view(), 2, &ScoreOptions::default()).unwrap();
        assert_eq!(s.get(NodeId(0)), Some(0.75));
        assert_eq!(s.get(NodeId(1)), Some(0.5));
        assert_eq!(s.get(NodeId(2)), Some(0.0));
    }

    #[test]
    fn four_node_level_two() {
        let fx = generate::four_node();
        let s = easyim_scores(&fx.graph.view(), 2, &ScoreOptions::default()).unwrap();
        let b = s.get(fx.node("B")).unwrap();
        assert!((b - 0.37).abs() < 1e-12);
        assert_eq!(s.argmax().unwrap().0, fx.node("C"));
    }

    #[test]
    fn star_center() {
        let g = generate::star(7, 0.1);
        for l in 1..4 {
            let s = easyim_scores(&g.view(), l, &ScoreOptions::default()).unwrap();
            assert!((s.get(NodeId(0)).unwrap() - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn masked_nodes_are_invisible() {
        let fx = generate::four_node();
        let mask = NodeMask::from_nodes(4, [fx.node("A")]).unwrap();
        let view = masked_view(&fx.graph, &mask).unwrap();
        let s = easyim_scores(&view, 2, &ScoreOptions::default()).unwrap();
        assert_eq!(s.get(fx.node("A")), None);
        assert!((s.get(fx.node("B")).unwrap() - 0.1 * 1.9).abs() < 1e-12);
    }

    #[test]
    fn schedules_agree() {
        let g = generate::erdos_renyi(400, 0.02, 1).unwrap();
        let par = ScoreOptions::default().with_exec(Execution::Parallel);
        let seq = ScoreOptions::default().with_exec(Execution::Sequential);
        assert_eq!(
            easyim_scores(&g.view(), 3, &par).unwrap(),
            easyim_scores(&g.view(), 3, &seq).unwrap()
        );
    }
}
