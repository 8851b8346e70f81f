//! Parameter schemes used by the experiments: uniform IC probability,
//! weighted cascade, LT weights, random opinions / interactions / thresholds.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_unit, Graph, NodeAttrs};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamScheme {
    /// `p_(u,v) = p` on every arc.
    IcUniform(f64),
    /// `p_(u,v) = 1 / |In(v)|`.
    Wc,
    /// `w_(u,v) = 1 / |In(v)|`.
    LtWeights,
    /// `o ~ U(-1, 1)`.
    OpinionUniform,
    /// `o ~ N(0, 1)` clamped to `[-1, 1]`.
    OpinionNormal,
    /// `φ ~ U(0, 1)`.
    PhiUniform,
    /// `θ ~ U(0, 1)`.
    ThetaUniform,
}

impl fmt::Display for ParamScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamScheme::IcUniform(p) => write!(f, "ic_uniform:{p}"),
            ParamScheme::Wc => f.write_str("wc"),
            ParamScheme::LtWeights => f.write_str("lt_weights"),
            ParamScheme::OpinionUniform => f.write_str("opinion_uniform"),
            ParamScheme::OpinionNormal => f.write_str("opinion_normal"),
            ParamScheme::PhiUniform => f.write_str("phi_uniform"),
            ParamScheme::ThetaUniform => f.write_str("theta_uniform"),
        }
    }
}

impl FromStr for ParamScheme {
    type Err = Error;

    /// `ic_uniform:0.1`, `ic_uniform` (p = 0.1), `wc`, `lt_weights`,
    /// `opinion_uniform`, `opinion_normal`, `phi_uniform`, `theta_uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s.as_str(), None),
        };
        let scheme = match name {
            "ic_uniform" => {
                let p = match arg {
                    Some(a) => a
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad probability `{a}`")))?,
                    None => 0.1,
                };
                ParamScheme::IcUniform(check_unit("p", p, 0.0, 1.0)?)
            }
            "wc" => ParamScheme::Wc,
            "lt_weights" => ParamScheme::LtWeights,
            "opinion_uniform" => ParamScheme::OpinionUniform,
            "opinion_normal" => ParamScheme::OpinionNormal,
            "phi_uniform" => ParamScheme::PhiUniform,
            "theta_uniform" => ParamScheme::ThetaUniform,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown parameter scheme `{s}`"
                )))
            }
        };
        if arg.is_some() && !matches!(scheme, ParamScheme::IcUniform(_)) {
            return Err(Error::InvalidArgument(format!(
                "scheme `{name}` takes no argument"
            )));
        }
        Ok(scheme)
    }
}

/// Returns a new graph with the scheme's field overwritten. Pure in `(g, scheme, seed)`.
pub fn assign_parameters(g: &Graph, scheme: ParamScheme, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match scheme {
        ParamScheme::IcUniform(p) => {
            check_unit("p", p, 0.0, 1.0)?;
            g.map_edges(|_, e| super::Edge { p, ..*e })
        }
        ParamScheme::Wc => g.map_edges(|_, e| super::Edge {
            p: 1.0 / g.in_degree(e.dst) as f64,
            ..*e
        }),
        ParamScheme::LtWeights => g.map_edges(|_, e| super::Edge {
            w: 1.0 / g.in_degree(e.dst) as f64,
            ..*e
        }),
        ParamScheme::PhiUniform => g.map_edges(|_, e| super::Edge {
            phi: rng.random::<f64>(),
            ..*e
        }),
        ParamScheme::OpinionUniform => g.map_attrs(|_, a| NodeAttrs {
            opinion: rng.random_range(-1.0..=1.0),
            ..*a
        }),
        ParamScheme::OpinionNormal => g.map_attrs(|_, a| {
            let z: f64 = rng.sample(StandardNormal);
            NodeAttrs {
                opinion: z.clamp(-1.0, 1.0),
                ..*a
            }
        }),
        ParamScheme::ThetaUniform => g.map_attrs(|_, a| NodeAttrs {
            theta: rng.random::<f64>(),
            ..*a
        }),
    }
}

/// Applies several schemes in order, each with a distinct derived seed.
pub fn assign_all(g: &Graph, schemes: &[ParamScheme], seed: u64) -> Result<Graph> {
    let mut out = g.clone();
    for (i, s) in schemes.iter().enumerate() {
        out = assign_parameters(&out, *s, seed.wrapping_add(i as u64))?;
    }
    Ok(out)
}
