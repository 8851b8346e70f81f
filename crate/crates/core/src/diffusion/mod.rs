//! Stochastic cascades under IC, WC, LT, live-edge LT, OI-IC and OI-LT.
//!
//! All models are step-synchronous: seeds are active at step 0 with their own
//! opinion, and step `t + 1` is decided from the nodes activated at step `t`
//! (IC family) or from all nodes active by step `t` (LT family). Within a step,
//! activators are visited in ascending id and arcs in storage order, which
//! fixes the order in which coins are requested.
//!
//! An OI-IC node hit by several activators in the same step averages their
//! signed opinions exactly like the OI-LT update (see
//! [`simultaneous_activation_policy`]). An OI-LT node combines the in-neighbours
//! that were active strictly before its own activation step.

pub mod coins;
mod opinion;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeWeight, Graph, NodeId};
use crate::{Error, Result};

pub use coins::{CoinSource, CoinTable, StreamCoins};
pub use opinion::{simultaneous_activation_policy, Contribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Model {
    Ic,
    /// IC with `p_(u,v) = 1 / |In(v)|`.
    Wc,
    Lt,
    LtLiveEdge,
    OiIc,
    OiLt,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Ic,
        Model::Wc,
        Model::Lt,
        Model::LtLiveEdge,
        Model::OiIc,
        Model::OiLt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Ic => "IC",
            Model::Wc => "WC",
            Model::Lt => "LT",
            Model::LtLiveEdge => "LT_LIVE_EDGE",
            Model::OiIc => "OI_IC",
            Model::OiLt => "OI_LT",
        }
    }

    pub fn is_opinion_aware(self) -> bool {
        matches!(self, Model::OiIc | Model::OiLt)
    }

    /// Arc attribute that acts as the propagation probability, both for
    /// cascades and for score assignment.
    pub fn edge_weight(self) -> EdgeWeight {
        match self {
            Model::Ic | Model::OiIc => EdgeWeight::P,
            Model::Wc => EdgeWeight::InverseInDegree,
            Model::Lt | Model::LtLiveEdge | Model::OiLt => EdgeWeight::W,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        Model::ALL
            .into_iter()
            .find(|m| m.name() == up)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// Where LT thresholds come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    /// The graph's fixed `θ_v`.
    #[default]
    Graph,
    /// A fresh `U(0, 1)` draw per node per cascade, the classical randomised LT
    /// that is equivalent in distribution to the live-edge model.
    UniformPerCascade,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub model: Model,
    /// Penalty on negative opinion mass in the effective opinion spread.
    pub lambda: f64,
    #[serde(default)]
    pub thresholds: ThresholdSource,
}

impl DiffusionSpec {
    /// `λ = 1`, graph thresholds.
    pub fn new(model: Model) -> Self {
        DiffusionSpec {
            model,
            lambda: 1.0,
            thresholds: ThresholdSource::Graph,
        }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        DiffusionSpec { lambda, ..self }
    }

    pub fn with_thresholds(self, thresholds: ThresholdSource) -> Self {
        DiffusionSpec { thresholds, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Spread values of one cascade, over the activated non-seed nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    /// `Γ(S) = |V_(a)| - |S|`.
    pub spread: usize,
    /// `Γᵒ(S) = Σ o'_v`.
    pub opinion: f64,
    /// `Γᵒ_λ(S) = Σ_{o'>0} o' - λ Σ_{o'<0} |o'|`.
    pub effective: f64,
}

/// One simulated run.
///
/// `activated` is sorted by node id; `final_opinion` and `activation_step` are
/// aligned with it. Models without an opinion layer report each node's own
/// opinion as its final opinion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeOutcome {
    pub seeds: Vec<NodeId>,
    pub activated: Vec<NodeId>,
    pub final_opinion: Vec<f64>,
    pub activation_step: Vec<u32>,
}

impl CascadeOutcome {
    fn position(&self, v: NodeId) -> Option<usize> {
        self.activated.binary_search(&v).ok()
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        self.position(v).is_some()
    }

    pub fn opinion_of(&self, v: NodeId) -> Option<f64> {
        self.position(v).map(|i| self.final_opinion[i])
    }

    pub fn step_of(&self, v: NodeId) -> Option<u32> {
        self.position(v).map(|i| self.activation_step[i])
    }

    pub fn spread(&self) -> usize {
        self.activated.len() - self.seeds.len()
    }
}

const INACTIVE: u32 = u32::MAX;
const UNSAMPLED: u32 = u32::MAX;
const NO_ARC: u32 = u32::MAX - 1;

/// Reusable cascade state for one graph.
///
/// Buffers are sized to `n` once; each run only resets the nodes the previous
/// run touched, so a cascade costs time proportional to the arcs it explores.
#[derive(Clone, Debug)]
pub struct CascadeEngine<'g> {
    graph: &'g Graph,
    step: Vec<u32>,
    opinion: Vec<f64>,
    acc: Vec<f64>,
    theta: Vec<f64>,
    live: Vec<u32>,
    touched: Vec<u32>,
    activated: Vec<u32>,
    seed_count: usize,
    frontier: Vec<u32>,
    next: Vec<u32>,
    hits: Vec<(u32, u32)>,
    buf: Vec<f64>,
}

impl<'g> CascadeEngine<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let n = graph.n();
        CascadeEngine {
            graph,
            step: vec![INACTIVE; n],
            opinion: vec![0.0; n],
            acc: vec![0.0; n],
            theta: vec![f64::NAN; n],
            live: vec![UNSAMPLED; n],
            touched: Vec::new(),
            activated: Vec::new(),
            seed_count: 0,
            frontier: Vec::new(),
            next: Vec::new(),
            hits: Vec::new(),
            buf: Vec::new(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            let v = v as usize;
            self.step[v] = INACTIVE;
            self.acc[v] = 0.0;
            self.theta[v] = f64::NAN;
            self.live[v] = UNSAMPLED;
        }
        self.touched.clear();
        self.activated.clear();
        self.frontier.clear();
        self.next.clear();
        self.seed_count = 0;
    }

    /// Runs one cascade to quiescence. Duplicate seeds are ignored.
    pub fn run<C: CoinSource + ?Sized>(
        &mut self,
        seeds: &[NodeId],
        spec: &DiffusionSpec,
        coins: &mut C,
    ) -> Result<()> {
        self.reset();
        spec.validate()?;
        if seeds.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        for &s in seeds {
            self.graph.check_node(s)?;
        }
        for &s in seeds {
            let v = s.index();
            if self.step[v] == INACTIVE {
                self.step[v] = 0;
                self.opinion[v] = self.graph.opinion(s);
                self.touched.push(s.0);
                self.frontier.push(s.0);
            }
        }
        self.frontier.sort_unstable();
        self.activated.extend_from_slice(&self.frontier);
        self.seed_count = self.activated.len();

        match spec.model {
            Model::Ic | Model::Wc | Model::OiIc => self.run_independent(spec, coins),
            Model::Lt | Model::OiLt => self.run_threshold(spec, coins),
            Model::LtLiveEdge => self.run_live_edge(coins),
        }
        Ok(())
    }

    fn finish_step(&mut self) {
        self.activated.extend_from_slice(&self.next);
        std::mem::swap(&mut self.frontier, &mut self.next);
        self.next.clear();
    }

    fn own_opinions(&mut self) {
        for &v in &self.next {
            self.opinion[v as usize] = self.graph.opinion(NodeId(v));
        }
    }

    fn run_independent<C: CoinSource + ?Sized>(&mut self, spec: &DiffusionSpec, coins: &mut C) {
        let g = self.graph;
        let weight = spec.model.edge_weight();
        let opinions = spec.model == Model::OiIc;
        let mut t = 0u32;
        while !self.frontier.is_empty() {
            self.hits.clear();
            for &u in &self.frontier {
                for e in g.out_edge_ids(NodeId(u)) {
                    let v = g.edge(e).dst.index();
                    // Nodes hit earlier in this step (step t + 1) still get a coin.
                    if self.step[v] <= t {
                        continue;
                    }
                    if coins.arc_live(e, g.weight(e, weight)) {
                        if self.step[v] == INACTIVE {
                            self.step[v] = t + 1;
                            self.touched.push(v as u32);
                            self.next.push(v as u32);
                        }
                        if opinions {
                            self.hits.push((v as u32, e as u32));
                        }
                    }
                }
            }
            self.next.sort_unstable();
            if opinions {
                // Stable: activators of the same target stay in ascending order.
                self.hits.sort_by_key(|h| h.0);
                let mut i = 0;
                while i < self.hits.len() {
                    let v = self.hits[i].0;
                    self.buf.clear();
                    while i < self.hits.len() && self.hits[i].0 == v {
                        let e = self.hits[i].1 as usize;
                        let edge = g.edge(e);
                        let o_u = self.opinion[edge.src.index()];
                        let agrees = coins.arc_agrees(e, edge.phi);
                        self.buf.push(if agrees { o_u } else { -o_u });
                        i += 1;
                    }
                    let own = g.opinion(NodeId(v));
                    self.opinion[v as usize] = opinion::combine(own, self.buf.iter().copied());
                }
            } else {
                self.own_opinions();
            }
            self.finish_step();
            t += 1;
        }
    }

    fn run_threshold<C: CoinSource + ?Sized>(&mut self, spec: &DiffusionSpec, coins: &mut C) {
        let g = self.graph;
        let resample = spec.thresholds == ThresholdSource::UniformPerCascade;
        let opinions = spec.model == Model::OiLt;
        let mut t = 0u32;
        while !self.frontier.is_empty() {
            for &u in &self.frontier {
                for e in g.out_edge_ids(NodeId(u)) {
                    let edge = g.edge(e);
                    let v = edge.dst.index();
                    if self.step[v] != INACTIVE {
                        continue;
                    }
                    if self.theta[v].is_nan() {
                        self.theta[v] = if resample {
                            coins.threshold(edge.dst)
                        } else {
                            g.theta(edge.dst)
                        };
                        self.touched.push(v as u32);
                    }
                    self.acc[v] += edge.w;
                    self.next.push(v as u32);
                }
            }
            self.next.sort_unstable();
            self.next.dedup();
            let (acc, theta) = (&self.acc, &self.theta);
            self.next.retain(|&v| acc[v as usize] >= theta[v as usize]);
            for &v in &self.next {
                self.step[v as usize] = t + 1;
            }
            if opinions {
                for idx in 0..self.next.len() {
                    let v = NodeId(self.next[idx]);
                    self.buf.clear();
                    for (e, edge) in g.in_arcs(v) {
                        if self.step[edge.src.index()] <= t {
                            let o_u = self.opinion[edge.src.index()];
                            let agrees = coins.arc_agrees(e, edge.phi);
                            self.buf.push(if agrees { o_u } else { -o_u });
                        }
                    }
                    self.opinion[v.index()] =
                        opinion::combine(g.opinion(v), self.buf.iter().copied());
                }
            } else {
                self.own_opinions();
            }
            self.finish_step();
            t += 1;
        }
    }

    fn run_live_edge<C: CoinSource + ?Sized>(&mut self, coins: &mut C) {
        let g = self.graph;
        let mut t = 0u32;
        while !self.frontier.is_empty() {
            for &u in &self.frontier {
                for e in g.out_edge_ids(NodeId(u)) {
                    let v = g.edge(e).dst;
                    if self.step[v.index()] != INACTIVE {
                        continue;
                    }
                    if self.live[v.index()] == UNSAMPLED {
                        self.buf.clear();
                        self.buf.extend(g.in_arcs(v).map(|(_, a)| a.w));
                        let choice = coins.live_in_arc(v, &self.buf);
                        self.live[v.index()] = match choice {
                            Some(i) => g.in_edge_ids(v)[i],
                            None => NO_ARC,
                        };
                        self.touched.push(v.0);
                    }
                    if self.live[v.index()] == e as u32 {
                        self.step[v.index()] = t + 1;
                        self.next.push(v.0);
                    }
                }
            }
            self.next.sort_unstable();
            self.own_opinions();
            self.finish_step();
            t += 1;
        }
    }

    pub fn seed_count(&self) -> usize {
        self.seed_count
    }

    /// Activated nodes in activation order (seeds first).
    pub fn activated(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.activated.iter().map(|&v| NodeId(v))
    }

    pub fn activated_len(&self) -> usize {
        self.activated.len()
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        self.step[v.index()] != INACTIVE
    }

    pub fn final_opinion(&self, v: NodeId) -> Option<f64> {
        self.is_active(v).then(|| self.opinion[v.index()])
    }

    pub fn step_of(&self, v: NodeId) -> Option<u32> {
        self.is_active(v).then(|| self.step[v.index()])
    }

    /// Activated non-seeds with their final opinions, in activation order.
    pub fn non_seed_opinions(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.activated[self.seed_count..]
            .iter()
            .map(|&v| (NodeId(v), self.opinion[v as usize]))
    }

    pub fn tally(&self, lambda: f64) -> Tally {
        let mut t = Tally::default();
        for (_, o) in self.non_seed_opinions() {
            t.spread += 1;
            t.opinion += o;
            // With λ = 1 this adds exactly the same terms as `opinion`.
            t.effective += if o > 0.0 { o } else { lambda * o };
        }
        t
    }

    pub fn outcome(&self) -> CascadeOutcome {
        let mut seeds: Vec<NodeId> = self.activated[..self.seed_count]
            .iter()
            .map(|&v| NodeId(v))
            .collect();
        seeds.sort_unstable();
        let mut activated: Vec<NodeId> = self.activated().collect();
        activated.sort_unstable();
        CascadeOutcome {
            final_opinion: activated.iter().map(|v| self.opinion[v.index()]).collect(),
            activation_step: activated.iter().map(|v| self.step[v.index()]).collect(),
            activated,
            seeds,
        }
    }
}

/// One cascade from `seeds` under `spec`, drawing every decision from `coins`.
pub fn run_cascade<C: CoinSource + ?Sized>(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    coins: &mut C,
) -> Result<CascadeOutcome> {
    let mut engine = CascadeEngine::new(g);
    engine.run(seeds, spec, coins)?;
    Ok(engine.outcome())
}
