//! Per-node influence scores `Δˡ(u)` over paths of length at most `l`.
//!
//! * [`path_union_scores`]: dense probabilistic-OR matrix products, quadratic
//!   memory, used as a reference on small graphs.
//! * [`easyim_scores`]: `Δⁱ(u) = Σ_(u,v) p (1 + Δⁱ⁻¹(v))`, two level buffers.
//! * [`osim_scores`]: the opinion-aware recurrence over `or`, `α` and `sc`.
//!
//! Scores are computed on a [`GraphView`]: masked nodes are neither endpoints
//! nor intermediates and have no score.

mod easyim;
mod osim;
mod path_union;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeWeight, GraphView, IdMap, NodeId, NodeMask};
use crate::{Error, Execution, Result};

pub use easyim::easyim_scores;
pub use osim::{osim_scores, OsimCell, OsimState};
pub use path_union::path_union_scores;

pub const DEFAULT_DENSE_CAP: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Arc attribute used as the path weight.
    pub weight: EdgeWeight,
    pub exec: Execution,
    /// Largest node count accepted by Path-Union.
    pub dense_cap: usize,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            weight: EdgeWeight::P,
            exec: Execution::default(),
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl ScoreOptions {
    pub fn with_weight(self, weight: EdgeWeight) -> Self {
        ScoreOptions { weight, ..self }
    }

    pub fn with_exec(self, exec: Execution) -> Self {
        ScoreOptions { exec, ..self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
    l: usize,
    masked: NodeMask,
}

impl ScoreVector {
    fn new(scores: Vec<f64>, l: usize, masked: &NodeMask) -> Self {
        ScoreVector {
            scores,
            l,
            masked: masked.clone(),
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn masked(&self) -> &NodeMask {
        &self.masked
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `Δˡ(v)`, or `None` for a masked or unknown node.
    pub fn get(&self, v: NodeId) -> Option<f64> {
        if self.masked.contains(v) {
            return None;
        }
        self.scores.get(v.index()).copied()
    }

    /// Unmasked `(node, score)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (NodeId::new(i), s))
            .filter(|(v, _)| !self.masked.contains(*v))
    }

    /// Highest-scoring unmasked node; ties go to the lowest id.
    pub fn argmax(&self) -> Option<(NodeId, f64)> {
        self.iter().fold(None, |best, (v, s)| match best {
            Some((_, b)) if s <= b => best,
            _ => Some((v, s)),
        })
    }

    /// `node,score` rows in id order after a schema comment.
    pub fn write_csv(&self, out: &mut impl Write, ids: &IdMap) -> Result<()> {
        writeln!(out, "# schema: osim-scores/1 l={}", self.l)?;
        writeln!(out, "node,score")?;
        for (v, s) in self.iter() {
            writeln!(out, "{},{}", ids.label(v), s)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScoreMode {
    /// EaSyIM.
    OpinionOblivious,
    /// OSIM.
    OpinionAware,
}

impl ScoreMode {
    pub fn name(self) -> &'static str {
        match self {
            ScoreMode::OpinionOblivious => "OPINION_OBLIVIOUS",
            ScoreMode::OpinionAware => "OPINION_AWARE",
        }
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "OPINION_OBLIVIOUS" | "OBLIVIOUS" => Ok(ScoreMode::OpinionOblivious),
            "OPINION_AWARE" | "AWARE" => Ok(ScoreMode::OpinionAware),
            _ => Err(Error::InvalidArgument(format!("unknown score mode `{s}`"))),
        }
    }
}

/// EaSyIM for the oblivious mode, OSIM for the aware mode.
pub fn assign_score(
    view: &GraphView<'_>,
    mode: ScoreMode,
    l: usize,
    opts: &ScoreOptions,
) -> Result<ScoreVector> {
    match mode {
        ScoreMode::OpinionOblivious => easyim_scores(view, l, opts),
        ScoreMode::OpinionAware => osim_scores(view, l, opts),
    }
}

fn check_l(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidArgument("path length l must be ≥ 1".into()));
    }
    Ok(())
}
