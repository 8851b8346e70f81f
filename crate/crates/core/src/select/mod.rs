//! Seed selection: score-driven greedy with activated-set discounting, and
//! the Monte-Carlo marginal-gain greedy baseline.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diffusion::DiffusionSpec;
use crate::graph::{masked_view, Graph, IdMap, NodeId, NodeMask};
use crate::scoring::{assign_score, path_union_scores, ScoreMode, ScoreOptions, ScoreVector};
use crate::spread::{
    activation_frequencies, exact_spread, mc_estimate_all, oracle_choice_bits, SpreadKind,
    ORACLE_BUDGET,
};
use crate::{Error, Execution, Result};

/// How `V_(a)` grows after a seed is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiscountPolicy {
    /// Only the seeds themselves.
    SeedsOnly,
    /// Every node active in at least a `tau` fraction of `replicas` cascades
    /// from the current seed set.
    McThreshold { tau: f64, replicas: usize },
}

impl Default for DiscountPolicy {
    fn default() -> Self {
        DiscountPolicy::McThreshold {
            tau: 0.5,
            replicas: 100,
        }
    }
}

impl DiscountPolicy {
    pub fn validate(&self) -> Result<()> {
        if let DiscountPolicy::McThreshold { tau, replicas } = *self {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(Error::ParameterOutOfRange {
                    name: "tau",
                    value: tau,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            if replicas == 0 {
                return Err(Error::InvalidArgument(
                    "discount replicas must be ≥ 1".into(),
                ));
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match self {
            DiscountPolicy::SeedsOnly => "SEEDS_ONLY".into(),
            DiscountPolicy::McThreshold { tau, replicas } => {
                format!("MC_THRESHOLD(tau={tau},replicas={replicas})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scorer {
    Assign(ScoreMode),
    PathUnion,
}

impl Scorer {
    fn name(self) -> &'static str {
        match self {
            Scorer::Assign(ScoreMode::OpinionOblivious) => "EASYIM",
            Scorer::Assign(ScoreMode::OpinionAware) => "OSIM",
            Scorer::PathUnion => "PATH_UNION",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectConfig {
    pub k: usize,
    pub l: usize,
    pub scorer: Scorer,
    pub spec: DiffusionSpec,
    pub policy: DiscountPolicy,
    pub master_seed: u64,
    pub exec: Execution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub node: NodeId,
    /// Score (or marginal gain) of the chosen node.
    pub score: f64,
    /// `|V_(a)|` after the update.
    pub activated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSelectionReport {
    pub algorithm: String,
    pub seeds: Vec<NodeId>,
    pub per_iteration: Vec<IterationRecord>,
    pub config: BTreeMap<String, String>,
}

impl SeedSelectionReport {
    /// `k,seed,score,activated` rows after a schema comment.
    pub fn write_csv(&self, out: &mut impl Write, ids: &IdMap) -> Result<()> {
        writeln!(
            out,
            "# schema: osim-selection/1 algorithm={}",
            self.algorithm
        )?;
        writeln!(out, "k,seed,score,activated")?;
        for r in &self.per_iteration {
            writeln!(
                out,
                "{},{},{},{}",
                r.iteration,
                ids.label(r.node),
                r.score,
                r.activated
            )?;
        }
        Ok(())
    }
}

/// SplitMix64 of `master ^ salt`, used to give each phase its own stream family.
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    let mut z =
        (master ^ salt.wrapping_mul(0xA24B_AED4_963E_E407)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_k(g: &Graph, k: usize) -> Result<()> {
    if g.n() == 0 {
        return Err(Error::InvalidArgument("graph has no nodes".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be ≥ 1".into()));
    }
    if k > g.n() {
        return Err(Error::NotEnoughNodes { k, live: g.n() });
    }
    Ok(())
}

/// Greedy selection by score: score `G(V \ V_(a))`, take the argmax (lowest id
/// on ties), grow `V_(a)` by the policy, repeat `k` times.
pub fn seed_select(g: &Graph, cfg: &SelectConfig) -> Result<SeedSelectionReport> {
    check_k(g, cfg.k)?;
    cfg.policy.validate()?;
    cfg.spec.validate()?;
    let opts = ScoreOptions {
        weight: cfg.spec.model.edge_weight(),
        exec: cfg.exec,
        ..ScoreOptions::default()
    };
    let mut mask = NodeMask::new(g.n());
    let mut seeds = Vec::with_capacity(cfg.k);
    let mut per_iteration = Vec::with_capacity(cfg.k);
    for it in 1..=cfg.k {
        let view = masked_view(g, &mask)?;
        let scores: ScoreVector = match cfg.scorer {
            Scorer::Assign(mode) => assign_score(&view, mode, cfg.l, &opts)?,
            Scorer::PathUnion => path_union_scores(&view, cfg.l, &opts)?,
        };
        let (v, score) = scores.argmax().ok_or(Error::NotEnoughNodes {
            k: cfg.k,
            live: seeds.len(),
        })?;
        seeds.push(v);
        mask.insert(v)?;
        if let DiscountPolicy::McThreshold { tau, replicas } = cfg.policy {
            let seed = derive_seed(cfg.master_seed, it as u64);
            let freq = activation_frequencies(g, &seeds, &cfg.spec, replicas, seed, cfg.exec)?;
            for (i, f) in freq.into_iter().enumerate() {
                if f >= tau {
                    mask.insert(NodeId::new(i))?;
                }
            }
        }
        log::debug!(
            "iteration {it}: chose {v} (score {score}), |V_a| = {}",
            mask.len()
        );
        per_iteration.push(IterationRecord {
            iteration: it,
            node: v,
            score,
            activated: mask.len(),
        });
    }
    let mut config = BTreeMap::new();
    config.insert("k".into(), cfg.k.to_string());
    config.insert("l".into(), cfg.l.to_string());
    config.insert("model".into(), cfg.spec.model.to_string());
    config.insert("lambda".into(), cfg.spec.lambda.to_string());
    config.insert("policy".into(), cfg.policy.describe());
    config.insert("master_seed".into(), cfg.master_seed.to_string());
    Ok(SeedSelectionReport {
        algorithm: cfg.scorer.name().into(),
        seeds,
        per_iteration,
        config,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Evaluator {
    MonteCarlo,
    Exact,
    /// Exact when every candidate of the iteration fits the oracle budget.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreedyConfig {
    pub k: usize,
    pub spec: DiffusionSpec,
    pub replicas: usize,
    pub master_seed: u64,
    pub evaluator: Evaluator,
    pub exec: Execution,
}

/// Objective maximised by the greedy baseline: effective opinion spread for
/// opinion-aware models, plain spread otherwise.
pub fn greedy_objective(spec: &DiffusionSpec) -> SpreadKind {
    if spec.model.is_opinion_aware() {
        SpreadKind::EffectiveOpinionSpread
    } else {
        SpreadKind::Spread
    }
}

/// Marginal-gain greedy: each iteration evaluates `σ(S ∪ {w}) - σ(S)` for
/// every `w ∉ S` and keeps the best (lowest id on ties). Monte-Carlo
/// evaluations within an iteration share one master seed.
pub fn modified_greedy(g: &Graph, cfg: &GreedyConfig) -> Result<SeedSelectionReport> {
    check_k(g, cfg.k)?;
    cfg.spec.validate()?;
    if cfg.replicas == 0 && cfg.evaluator != Evaluator::Exact {
        return Err(Error::InvalidArgument("replicas must be ≥ 1".into()));
    }
    let kind = greedy_objective(&cfg.spec);
    let mut seeds: Vec<NodeId> = Vec::with_capacity(cfg.k);
    let mut chosen = vec![false; g.n()];
    let mut per_iteration = Vec::with_capacity(cfg.k);
    let mut evaluators_used = Vec::new();
    for it in 1..=cfg.k {
        let candidates: Vec<NodeId> = g.nodes().filter(|v| !chosen[v.index()]).collect();
        let with = |w: NodeId| {
            let mut s = seeds.clone();
            s.push(w);
            s
        };
        let exact = match cfg.evaluator {
            Evaluator::Exact => true,
            Evaluator::MonteCarlo => false,
            Evaluator::Auto => candidates.iter().all(|&w| {
                oracle_choice_bits(g, &with(w), &cfg.spec).is_ok_and(|b| b <= ORACLE_BUDGET as f64)
            }),
        };
        evaluators_used.push(if exact { "exact" } else { "mc" });
        let seed = derive_seed(cfg.master_seed, it as u64);
        let inner = if cfg.exec.is_parallel() {
            Execution::Sequential
        } else {
            cfg.exec
        };
        let value = |set: &[NodeId]| -> Result<f64> {
            if set.is_empty() {
                return Ok(0.0);
            }
            if exact {
                exact_spread(g, set, &cfg.spec, kind)
            } else {
                mc_estimate_all(g, set, &cfg.spec, cfg.replicas, seed, inner)
                    .map(|e| e.get(kind).mean)
            }
        };
        let base = value(&seeds)?;
        let values: Vec<Result<f64>> = cfg
            .exec
            .map_collect(candidates.len(), |i| value(&with(candidates[i])));
        let mut best: Option<(NodeId, f64)> = None;
        for (&w, val) in candidates.iter().zip(values) {
            let gain = val? - base;
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((w, gain));
            }
        }
        let (w, gain) = best.expect("k ≤ n leaves a candidate");
        seeds.push(w);
        chosen[w.index()] = true;
        log::debug!("greedy iteration {it}: chose {w} (gain {gain})");
        per_iteration.push(IterationRecord {
            iteration: it,
            node: w,
            score: gain,
            activated: seeds.len(),
        });
    }
    let mut config = BTreeMap::new();
    config.insert("k".into(), cfg.k.to_string());
    config.insert("model".into(), cfg.spec.model.to_string());
    config.insert("lambda".into(), cfg.spec.lambda.to_string());
    config.insert("objective".into(), kind.to_string());
    config.insert("replicas".into(), cfg.replicas.to_string());
    config.insert("evaluator".into(), evaluators_used.join(","));
    config.insert("master_seed".into(), cfg.master_seed.to_string());
    Ok(SeedSelectionReport {
        algorithm: "MODIFIED_GREEDY".into(),
        seeds,
        per_iteration,
        config,
    })
}
