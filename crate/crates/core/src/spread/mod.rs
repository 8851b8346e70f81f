//! Expected spread: Monte-Carlo estimation and exact enumeration.

mod exact;
pub mod fixtures;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffusion::{CascadeEngine, DiffusionSpec, StreamCoins, Tally};
use crate::graph::{Graph, NodeId};
use crate::{pairwise_sum, Error, Execution, Result};

pub use exact::{
    exact_outcome, exact_spread, oracle_choice_bits, EnumerationOrder, ExactOptions, ExactOutcome,
    ORACLE_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpreadKind {
    /// `Γ(S)`, activated non-seeds.
    Spread,
    /// `Γᵒ(S)`, sum of final opinions of activated non-seeds.
    OpinionSpread,
    /// `Γᵒ_λ(S)`.
    EffectiveOpinionSpread,
}

impl SpreadKind {
    pub const ALL: [SpreadKind; 3] = [
        SpreadKind::Spread,
        SpreadKind::OpinionSpread,
        SpreadKind::EffectiveOpinionSpread,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpreadKind::Spread => "SPREAD",
            SpreadKind::OpinionSpread => "OPINION_SPREAD",
            SpreadKind::EffectiveOpinionSpread => "EFFECTIVE_OPINION_SPREAD",
        }
    }

    fn of(self, t: &Tally) -> f64 {
        match self {
            SpreadKind::Spread => t.spread as f64,
            SpreadKind::OpinionSpread => t.opinion,
            SpreadKind::EffectiveOpinionSpread => t.effective,
        }
    }
}

impl fmt::Display for SpreadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpreadKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        SpreadKind::ALL
            .into_iter()
            .find(|k| k.name() == up)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown spread kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√replicas`; 0 for a single replica.
    pub std_error: f64,
    pub replicas: usize,
    pub kind: SpreadKind,
}

impl SpreadEstimate {
    fn from_samples(kind: SpreadKind, xs: &[f64]) -> Self {
        let r = xs.len();
        let mean = pairwise_sum(xs) / r as f64;
        let std_error = if r > 1 {
            let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&sq) / (r - 1) as f64 / r as f64).sqrt()
        } else {
            0.0
        };
        SpreadEstimate {
            mean,
            std_error,
            replicas: r,
            kind,
        }
    }

    /// Whether `value` lies within `z` standard errors of the mean.
    pub fn covers(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.std_error
    }
}

/// All three kinds from the same replicas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimates {
    pub spread: SpreadEstimate,
    pub opinion: SpreadEstimate,
    pub effective: SpreadEstimate,
}

impl SpreadEstimates {
    pub fn get(&self, kind: SpreadKind) -> &SpreadEstimate {
        match kind {
            SpreadKind::Spread => &self.spread,
            SpreadKind::OpinionSpread => &self.opinion,
            SpreadKind::EffectiveOpinionSpread => &self.effective,
        }
    }
}

fn check_inputs(g: &Graph, seeds: &[NodeId], spec: &DiffusionSpec, replicas: usize) -> Result<()> {
    if replicas == 0 {
        return Err(Error::InvalidArgument("replicas must be ≥ 1".into()));
    }
    spec.validate()?;
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    for &s in seeds {
        g.check_node(s)?;
    }
    Ok(())
}

/// Per-replica tallies in replica order. Replica `r` draws from
/// `StreamCoins::new(master_seed, r)`, so the values do not depend on `exec`.
pub fn mc_tallies(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    replicas: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<Tally>> {
    check_inputs(g, seeds, spec, replicas)?;
    exec.map_init_collect(
        replicas,
        || CascadeEngine::new(g),
        |engine, r| {
            let mut coins = StreamCoins::new(master_seed, r as u64);
            engine
                .run(seeds, spec, &mut coins)
                .map(|()| engine.tally(spec.lambda))
        },
    )
    .into_iter()
    .collect()
}

pub fn mc_estimate_all(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    replicas: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<SpreadEstimates> {
    let tallies = mc_tallies(g, seeds, spec, replicas, master_seed, exec)?;
    let est = |kind: SpreadKind| {
        let xs: Vec<f64> = tallies.iter().map(|t| kind.of(t)).collect();
        SpreadEstimate::from_samples(kind, &xs)
    };
    Ok(SpreadEstimates {
        spread: est(SpreadKind::Spread),
        opinion: est(SpreadKind::OpinionSpread),
        effective: est(SpreadKind::EffectiveOpinionSpread),
    })
}

/// Monte-Carlo estimate of one spread kind with the default execution.
pub fn mc_estimate(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    kind: SpreadKind,
    replicas: usize,
    master_seed: u64,
) -> Result<SpreadEstimate> {
    mc_estimate_all(g, seeds, spec, replicas, master_seed, Execution::default())
        .map(|e| *e.get(kind))
}

/// Fraction of replicas in which each node ends up active (seeds included).
pub fn activation_frequencies(
    g: &Graph,
    seeds: &[NodeId],
    spec: &DiffusionSpec,
    replicas: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    check_inputs(g, seeds, spec, replicas)?;
    let runs: Vec<Result<Vec<NodeId>>> = exec.map_init_collect(
        replicas,
        || CascadeEngine::new(g),
        |engine, r| {
            let mut coins = StreamCoins::new(master_seed, r as u64);
            engine
                .run(seeds, spec, &mut coins)
                .map(|()| engine.activated().collect())
        },
    );
    let mut counts = vec![0u32; g.n()];
    for run in runs {
        for v in run? {
            counts[v.index()] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / replicas as f64)
        .collect())
}
