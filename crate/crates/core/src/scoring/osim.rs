use super::{check_l, ScoreOptions, ScoreVector};
use crate::graph::{GraphView, NodeId};
use crate::Result;

/// Accumulators of one node at one path length.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OsimCell {
    /// `orᵢ(u)`: path-weighted initial opinions at distance `i`.
    pub or: f64,
    /// `αᵢ(u)`: path weights times `Π (2φ - 1) / 2`.
    pub alpha: f64,
    /// `scᵢ(u)`: accumulated opinion-change terms.
    pub sc: f64,
    /// `Δⁱ(u)`.
    pub delta: f64,
}

/// Accumulators for every node at the current path length.
#[derive(Clone, Debug, PartialEq)]
pub struct OsimState {
    level: usize,
    cells: Vec<OsimCell>,
}

impl OsimState {
    /// `α₀ = 1`, `or₀ = o_u`, `sc₀ = Δ⁰ = 0`.
    pub fn initial(view: &GraphView<'_>) -> Self {
        let g = view.graph();
        let cells = g
            .nodes()
            .map(|u| OsimCell {
                or: g.opinion(u),
                alpha: 1.0,
                sc: 0.0,
                delta: 0.0,
            })
            .collect();
        OsimState { level: 0, cells }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn cell(&self, u: NodeId) -> &OsimCell {
        &self.cells[u.index()]
    }

    /// Advances from level `i - 1` to `i`, writing into `next`.
    pub fn advance_into(&self, view: &GraphView<'_>, opts: &ScoreOptions, next: &mut OsimState) {
        let g = view.graph();
        let prev = &self.cells;
        next.cells.resize(prev.len(), OsimCell::default());
        next.level = self.level + 1;
        opts.exec.for_each_mut(&mut next.cells, |u, cell| {
            let u = NodeId::new(u);
            let o_u = g.opinion(u);
            let (mut or, mut alpha, mut sc) = (0.0, 0.0, 0.0);
            for (e, arc) in view.out_arcs(u) {
                let p = g.weight(e, opts.weight);
                let v = &prev[arc.dst.index()];
                or += p * v.or;
                alpha += p * v.alpha * (2.0 * arc.phi - 1.0) / 2.0;
                sc += p * v.sc;
            }
            sc += o_u * alpha;
            *cell = OsimCell {
                or,
                alpha,
                sc,
                delta: prev[u.index()].delta + (or + sc + o_u * alpha) / 2.0,
            };
        });
    }

    fn into_scores(self) -> Vec<f64> {
        self.cells.into_iter().map(|c| c.delta).collect()
    }
}

/// Opinion-aware scores: per level and node,
/// `orᵢ = Σ p orᵢ₋₁(v)`, `αᵢ = Σ p αᵢ₋₁(v) (2φ - 1)/2`, `scᵢ = Σ p scᵢ₋₁(v) + o_u αᵢ`,
/// `Δⁱ = Δⁱ⁻¹ + (orᵢ + scᵢ + o_u αᵢ) / 2`.
pub fn osim_scores(view: &GraphView<'_>, l: usize, opts: &ScoreOptions) -> Result<ScoreVector> {
    check_l(l)?;
    let mut cur = OsimState::initial(view);
    let mut next = OsimState {
        level: 0,
        cells: Vec::with_capacity(view.n()),
    };
    for _ in 0..l {
        cur.advance_into(view, opts, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    drop(next);
    Ok(ScoreVector::new(cur.into_scores(), l, view.mask()))
}
