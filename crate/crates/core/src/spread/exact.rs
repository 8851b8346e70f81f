//! Exact expectations by enumerating every outcome of the random choices a
//! cascade makes.
//!
//! The enumeration is a depth-first walk over decision sequences. Each leaf is
//! one full cascade replayed against a script of choices; decisions past the
//! end of the script take their first branch and extend it. Decisions with a
//! single possible outcome (probability 0 or 1) never branch.

use std::collections::VecDeque;

use crate::diffusion::{CascadeEngine, CoinSource, DiffusionSpec, Model, ThresholdSource};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::spread::SpreadKind;
use crate::{Error, Result};

/// Maximum `log2` of the outcome count the oracle accepts by default.
pub const ORACLE_BUDGET: u32 = 24;

const RESIDUAL_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EnumerationOrder {
    /// First branch of every decision first.
    #[default]
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    pub budget_bits: u32,
    pub order: EnumerationOrder,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            budget_bits: ORACLE_BUDGET,
            order: EnumerationOrder::Forward,
        }
    }
}

/// Per-node expectations over all outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactOutcome {
    /// `P(v active)`.
    pub activation: Vec<f64>,
    /// `E[o'_v · 1{v active}]`.
    pub opinion: Vec<f64>,
    /// `E[(o'_v or λ·o'_v when negative) · 1{v active}]`.
    pub effective: Vec<f64>,
    pub is_seed: Vec<bool>,
    /// Number of enumerated outcomes.
    pub leaves: u64,
}

impl ExactOutcome {
    /// Sum over non-seed nodes in id order.
    pub fn spread(&self, kind: SpreadKind) -> f64 {
        let per = match kind {
            SpreadKind::Spread => &self.activation,
            SpreadKind::OpinionSpread => &self.opinion,
            SpreadKind::EffectiveOpinionSpread => &self.effective,
        };
        per.iter()
            .zip(&self.is_seed)
            .filter(|(_, &s)| !s)
            .map(|(x, _)| x)
            .sum()
    }
}

#[derive(Clone, Copy, Debug)]
struct Step {
    rank: u32,
    arity: u32,
}

/// Answers coins from a script of branch ranks and records new decisions.
struct ScriptedCoins {
    script: Vec<Step>,
    cursor: usize,
    prob: f64,
    order: EnumerationOrder,
    outcomes: Vec<f64>,
    labels: Vec<Option<usize>>,
}

impl ScriptedCoins {
    fn new(order: EnumerationOrder) -> Self {
        ScriptedCoins {
            script: Vec::new(),
            cursor: 0,
            prob: 1.0,
            order,
            outcomes: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn rewind(&mut self) {
        self.cursor = 0;
        self.prob = 1.0;
    }

    /// Picks one of `self.outcomes` (all positive) and multiplies its probability in.
    fn branch(&mut self) -> usize {
        let arity = self.outcomes.len() as u32;
        debug_assert!(arity >= 1);
        if arity == 1 {
            return 0;
        }
        if self.cursor == self.script.len() {
            self.script.push(Step { rank: 0, arity });
        }
        let step = self.script[self.cursor];
        debug_assert_eq!(step.arity, arity, "replay diverged");
        self.cursor += 1;
        let choice = match self.order {
            EnumerationOrder::Forward => step.rank,
            EnumerationOrder::Reverse => arity - 1 - step.rank,
        } as usize;
        self.prob *= self.outcomes[choice];
        choice
    }

    fn binary(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        self.outcomes.clear();
        self.outcomes.extend([p, 1.0 - p]);
        self.branch() == 0
    }

    /// Moves to the next unexplored leaf; `false` when the walk is complete.
    fn advance(&mut self) -> bool {
        while let Some(last) = self.script.last_mut() {
            if last.rank + 1 < last.arity {
                last.rank += 1;
                return true;
            }
            self.script.pop();
        }
        false
    }
}

impl CoinSource for ScriptedCoins {
    fn arc_live(&mut self, _edge: EdgeId, p: f64) -> bool {
        self.binary(p)
    }

    fn arc_agrees(&mut self, _edge: EdgeId, phi: f64) -> bool {
        self.binary(phi)
    }

    fn live_in_arc(&mut self, _node: NodeId, weights: &[f64]) -> Option<usize> {
        self.outcomes.clear();
        self.labels.clear();
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                self.outcomes.push(w);
                self.labels.push(Some(i));
            }
        }
        let residual = 1.0 - weights.iter().sum::<f64>();
        if residual > RESIDUAL_EPS || self.outcomes.is_empty() {
            self.outcomes.push(residual.max(0.0));
            self.labels.push(None);
        }
        let c = self.branch();
        self.labels[c]
    }

    fn threshold(&mut self, _node: NodeId) -> f64 {
        unreachable!("random thresholds are enumerated through live edges")
    }
}

/// The model actually enumerated: randomised-threshold LT is replaced by its
/// live-edge equivalent.
fn enumerated_model(spec: &DiffusionSpec) -> Result<Model> {
    match (spec.model, spec.thresholds) {
        (Model::Lt, ThresholdSource::UniformPerCascade) => Ok(Model::LtLiveEdge),
        (Model::OiLt, ThresholdSource::UniformPerCascade) => Err(Error::Unsupported(
            "exact OI_LT with random thresholds (opinions depend on the activation order)".into(),
        )),
        (m, _) => Ok(m),
    }
}

/// `log2` of the number of outcomes the enumeration may visit, counted over
/// arcs whose source is reachable from `seeds`.
pub fn oracle_choice_bits(g: &Graph, seeds: &[NodeId], spec: &DiffusionSpec) -> Result<f64> {
    let model = enumerated_model(spec)?;
    let weight = model.edge_weight();
    let mut seed = vec![false; g.n()];
    for &s in seeds {
        seed[g.check_node(s)?.index()] = true;
    }
    let mut reached = seed.clone();
    let mut queue: VecDeque<NodeId> = seeds.iter().copied().collect();
    let arc_usable = |e: EdgeId| match model {
        Model::Lt | Model::OiLt => true,
        _ => g.weight(e, weight) > 0.0,
    };
    while let Some(u) = queue.pop_front() {
        for e in g.out_edge_ids(u) {
            let v = g.edge(e).dst;
            if arc_usable(e) && !reached[v.index()] {
                reached[v.index()] = true;
                queue.push_back(v);
            }
        }
    }
    let uncertain = |x: f64| x > 0.0 && x < 1.0;
    let mut bits = 0.0;
    for (e, edge) in g.edges().iter().enumerate() {
        if !reached[edge.src.index()] || seed[edge.dst.index()] {
            continue;
        }
        if matches!(model, Model::Ic | Model::Wc | Model::OiIc) && uncertain(g.weight(e, weight)) {
            bits += 1.0;
        }
        if model.is_opinion_aware() && uncertain(edge.phi) {
            bits += 1.0;
        }
    }
    if model == Model::LtLiveEdge {
        for v in g.nodes().filter(|v| reached[v.index()] && !seed[v.index()]) {
            let positive = g.in_arcs(v).filter(|(_, e)| e.w > 0.0).count();
            let residual = 1.0 - g.in_arcs(v).map(|(_, e)| e.w).sum::<f64>();
            let outcomes = positive + usize::from(residual > RESIDUAL_EPS);
            bits += (outcomes.max(1) as f64).log2();
        }
    }
    Ok(bits)
}

/// Enumerates every outcome of the cascade from `seeds`.
pub fn exact_outcome(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    opts: ExactOptions,
) -> Result<ExactOutcome> {
    spec.validate()?;
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    let bits = oracle_choice_bits(g, seeds, spec)?;
    if bits > opts.budget_bits as f64 + 1e-9 {
        return Err(Error::OracleBudgetExceeded {
            required: bits,
            budget: opts.budget_bits,
        });
    }
    let run_spec = DiffusionSpec {
        model: enumerated_model(spec)?,
        ..*spec
    };
    let n = g.n();
    let mut out = ExactOutcome {
        activation: vec![0.0; n],
        opinion: vec![0.0; n],
        effective: vec![0.0; n],
        is_seed: vec![false; n],
        leaves: 0,
    };
    for &s in seeds {
        out.is_seed[s.index()] = true;
    }
    let mut engine = CascadeEngine::new(g);
    let mut coins = ScriptedCoins::new(opts.order);
    loop {
        coins.rewind();
        engine.run(seeds, &run_spec, &mut coins)?;
        let w = coins.prob;
        for v in engine.activated() {
            let o = engine.final_opinion(v).expect("activated");
            let i = v.index();
            out.activation[i] += w;
            out.opinion[i] += w * o;
            out.effective[i] += w * if o > 0.0 { o } else { spec.lambda * o };
        }
        out.leaves += 1;
        if !coins.advance() {
            break;
        }
    }
    Ok(out)
}

/// Exact expected spread of one kind, under the default budget.
pub fn exact_spread(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    kind: SpreadKind,
) -> Result<f64> {
    exact_outcome(g, seeds, spec, ExactOptions::default()).map(|o| o.spread(kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphBuilder};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn four_node_ic_spreads() {
        let fx = generate::four_node();
        let spec = DiffusionSpec::new(Model::Ic);
        for (label, want) in [("A", 0.8), ("B", 0.3628), ("C", 0.9), ("D", 0.0)] {
            let got =
                exact_spread(&fx.graph, &[fx.node(label)], &spec, SpreadKind::Spread).unwrap();
            assert!(close(got, want), "{label}: {got}");
        }
    }

    #[test]
    fn four_node_opinion_spreads() {
        let fx = generate::four_node();
        let spec = DiffusionSpec::new(Model::OiIc);
        for (label, want) in [("A", 0.136), ("C", -0.351), ("D", 0.0)] {
            let got = exact_spread(
                &fx.graph,
                &[fx.node(label)],
                &spec,
                SpreadKind::OpinionSpread,
            )
            .unwrap();
            assert!(close(got, want), "{label}: {got}");
        }
    }

    #[test]
    fn single_node() {
        let g = GraphBuilder::new(1).build();
        for model in Model::ALL {
            let spec = DiffusionSpec::new(model);
            for kind in SpreadKind::ALL {
                assert_eq!(exact_spread(&g, &[NodeId(0)], &spec, kind).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let g = generate::random_dag(7, 0.5, 3);
        let spec = DiffusionSpec::new(Model::OiIc);
        let out = exact_outcome(&g, &[NodeId(0)], &spec, ExactOptions::default()).unwrap();
        assert!(close(out.activation[0], 1.0));
        assert!(out
            .activation
            .iter()
            .all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
    }

    #[test]
    fn orders_agree() {
        let g = generate::random_dag(8, 0.4, 5);
        let spec = DiffusionSpec::new(Model::OiIc);
        let f = exact_outcome(&g, &[NodeId(0)], &spec, ExactOptions::default()).unwrap();
        let r = exact_outcome(
            &g,
            &[NodeId(0)],
            &spec,
            ExactOptions {
                order: EnumerationOrder::Reverse,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(f.leaves, r.leaves);
        for kind in SpreadKind::ALL {
            assert!(close(f.spread(kind), r.spread(kind)));
        }
    }

    #[test]
    fn budget_refusal() {
        let g = generate::erdos_renyi(30, 0.3, 1).unwrap();
        let spec = DiffusionSpec::new(Model::Ic);
        let err = exact_spread(&g, &[NodeId(0)], &spec, SpreadKind::Spread).unwrap_err();
        assert!(matches!(
            err,
            Error::OracleBudgetExceeded { budget: 24, .. }
        ));
    }

    #[test]
    fn random_threshold_lt_uses_live_edges() {
        let fx = generate::four_node();
        let lt = DiffusionSpec::new(Model::Lt).with_thresholds(ThresholdSource::UniformPerCascade);
        let le = DiffusionSpec::new(Model::LtLiveEdge);
        let a = exact_spread(&fx.graph, &[fx.node("B")], &lt, SpreadKind::Spread).unwrap();
        let b = exact_spread(&fx.graph, &[fx.node("B")], &le, SpreadKind::Spread).unwrap();
        assert_eq!(a, b);
        let oi =
            DiffusionSpec::new(Model::OiLt).with_thresholds(ThresholdSource::UniformPerCascade);
        assert!(matches!(
            exact_spread(&fx.graph, &[fx.node("B")], &oi, SpreadKind::Spread),
            Err(Error::Unsupported(_))
        ));
    }
}
