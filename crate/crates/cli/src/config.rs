//! Experiment configuration: flat `key = value` text, list values separated by
//! commas, `#` starts a comment. Command-line overrides use the same syntax.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use osim_core::diffusion::{Model, ThresholdSource};
use osim_core::graph::ParamScheme;
use osim_core::select::{DiscountPolicy, Evaluator};
use osim_core::spread::SpreadKind;

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "graph",
    "attributes",
    "directed",
    "generator",
    "n",
    "q",
    "depth",
    "branching",
    "p",
    "nx",
    "ny",
    "elements",
    "subsets",
    "params",
    "params_seed",
    "model",
    "thresholds",
    "algorithm",
    "algorithms",
    "k",
    "l",
    "clamp_l",
    "diameter_samples",
    "lambda",
    "replicas",
    "greedy_replicas",
    "evaluator",
    "policy",
    "tau",
    "discount_replicas",
    "kinds",
    "seeds",
    "master_seed",
    "output",
];

/// Raw `key → value` pairs with the origin of each value for diagnostics.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, String)>,
    base_dir: Option<PathBuf>,
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            raw.set(line, &format!("{origin}:{}", i + 1))?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::invalid(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        let mut raw = RawConfig::parse(&text, &path.display().to_string())?;
        raw.base_dir = path.parent().map(Path::to_path_buf);
        Ok(raw)
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, assignment: &str, origin: &str) -> CliResult<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            CliError::invalid(format!(
                "{origin}: expected `key = value`, got `{assignment}`"
            ))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::invalid(format!("{origin}: unknown key `{key}`")));
        }
        self.entries
            .insert(key, (value.trim().to_string(), origin.to_string()));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&(String, String)> {
        self.entries.get(key)
    }

    fn parse_with<T>(
        &self,
        key: &str,
        what: &str,
        f: impl Fn(&str) -> Option<T>,
    ) -> CliResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, origin)) => f(v).map(Some).ok_or_else(|| {
                CliError::invalid(format!("{origin}: `{key}` expects {what}, got `{v}`"))
            }),
        }
    }

    fn scalar<T: FromStr>(&self, key: &str, what: &str) -> CliResult<Option<T>> {
        self.parse_with(key, what, |v| v.parse().ok())
    }

    fn list<T: FromStr>(&self, key: &str, what: &str) -> CliResult<Option<Vec<T>>> {
        self.parse_with(key, what, |v| {
            if v.is_empty() {
                return Some(Vec::new());
            }
            v.split(',').map(|x| x.trim().parse().ok()).collect()
        })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|(v, _)| {
            let p = PathBuf::from(v);
            match &self.base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Er,
    Tree,
    BipartiteCounterexample,
    SetcoverReduction,
    FourNode,
}

impl FromStr for GeneratorKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ER" => Ok(GeneratorKind::Er),
            "TREE" => Ok(GeneratorKind::Tree),
            "BIPARTITE_COUNTEREXAMPLE" => Ok(GeneratorKind::BipartiteCounterexample),
            "SETCOVER_REDUCTION" => Ok(GeneratorKind::SetcoverReduction),
            "FIG1" | "FOUR_NODE" => Ok(GeneratorKind::FourNode),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub q: f64,
    pub depth: usize,
    pub branching: usize,
    pub p: f64,
    pub nx: usize,
    pub ny: usize,
    pub elements: usize,
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File {
        path: PathBuf,
        attributes: Option<PathBuf>,
        directed: bool,
    },
    Generated(GeneratorSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Easyim,
    Osim,
    ModifiedGreedy,
    PathUnion,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Easyim => "EASYIM",
            Algorithm::Osim => "OSIM",
            Algorithm::ModifiedGreedy => "MODIFIED_GREEDY",
            Algorithm::PathUnion => "PATH_UNION",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EASYIM" => Ok(Algorithm::Easyim),
            "OSIM" => Ok(Algorithm::Osim),
            "MODIFIED_GREEDY" => Ok(Algorithm::ModifiedGreedy),
            "PATH_UNION" => Ok(Algorithm::PathUnion),
            _ => Err(()),
        }
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// `0 1 | 1 2 | 2`: subsets separated by `|`, elements by whitespace.
fn parse_subsets(s: &str) -> Option<Vec<Vec<usize>>> {
    s.split('|')
        .map(|part| part.split_whitespace().map(|x| x.parse().ok()).collect())
        .collect()
}

fn parse_evaluator(s: &str) -> Option<Evaluator> {
    match s.trim().to_ascii_uppercase().as_str() {
        "MONTE_CARLO" | "MC" => Some(Evaluator::MonteCarlo),
        "EXACT" => Some(Evaluator::Exact),
        "AUTO" => Some(Evaluator::Auto),
        _ => None,
    }
}

fn parse_thresholds(s: &str) -> Option<ThresholdSource> {
    match s.trim().to_ascii_lowercase().as_str() {
        "graph" => Some(ThresholdSource::Graph),
        "uniform" | "uniform_per_cascade" => Some(ThresholdSource::UniformPerCascade),
        _ => None,
    }
}

/// Typed experiment configuration with defaults applied.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graph: Option<GraphSource>,
    pub generator: Option<GeneratorSpec>,
    pub params: Vec<ParamScheme>,
    pub params_seed: Option<u64>,
    pub model: Model,
    pub thresholds: ThresholdSource,
    pub algorithm: Algorithm,
    pub algorithms: Vec<Algorithm>,
    /// `None` when the key is absent; `Some(vec![])` for an explicit empty list.
    pub k: Option<Vec<usize>>,
    pub l: usize,
    pub clamp_l: bool,
    pub diameter_samples: usize,
    pub lambda: Vec<f64>,
    pub replicas: usize,
    pub greedy_replicas: usize,
    pub evaluator: Evaluator,
    pub policy: DiscountPolicy,
    pub kinds: Vec<SpreadKind>,
    pub seeds_file: Option<PathBuf>,
    pub master_seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> CliResult<Self> {
        let generator = match raw.parse_with(
            "generator",
            "one of ER, TREE, BIPARTITE_COUNTEREXAMPLE, SETCOVER_REDUCTION, FIG1",
            |v| v.parse::<GeneratorKind>().ok(),
        )? {
            None => None,
            Some(kind) => {
                let nx = raw.scalar("nx", "a positive integer")?.unwrap_or(3);
                Some(GeneratorSpec {
                    kind,
                    n: raw.scalar("n", "a non-negative integer")?.unwrap_or(500),
                    q: raw.scalar("q", "a probability")?.unwrap_or(0.01),
                    depth: raw.scalar("depth", "a non-negative integer")?.unwrap_or(3),
                    branching: raw.scalar("branching", "a positive integer")?.unwrap_or(2),
                    p: raw.scalar("p", "a probability")?.unwrap_or(0.1),
                    nx,
                    ny: raw.scalar("ny", "a positive integer")?.unwrap_or(2 * nx),
                    elements: raw.scalar("elements", "a positive integer")?.unwrap_or(0),
                    subsets: raw
                        .parse_with("subsets", "subsets like `0 1 | 1 2`", parse_subsets)?
                        .unwrap_or_default(),
                })
            }
        };
        let graph = match raw.path("graph") {
            Some(path) => Some(GraphSource::File {
                path,
                attributes: raw.path("attributes"),
                directed: raw
                    .parse_with("directed", "true or false", parse_bool)?
                    .unwrap_or(true),
            }),
            None => generator.clone().map(GraphSource::Generated),
        };
        if raw.get("attributes").is_some() && raw.get("graph").is_none() {
            return Err(CliError::invalid("`attributes` requires `graph`"));
        }

        let policy_name: String = raw
            .scalar("policy", "SEEDS_ONLY or MC_THRESHOLD")?
            .unwrap_or_else(|| "MC_THRESHOLD".into());
        let policy = match policy_name.to_ascii_uppercase().as_str() {
            "SEEDS_ONLY" => DiscountPolicy::SeedsOnly,
            "MC_THRESHOLD" => DiscountPolicy::McThreshold {
                tau: raw.scalar("tau", "a number in (0, 1]")?.unwrap_or(0.5),
                replicas: raw
                    .scalar("discount_replicas", "a positive integer")?
                    .unwrap_or(100),
            },
            _ => {
                return Err(CliError::invalid(format!(
                    "`policy` expects SEEDS_ONLY or MC_THRESHOLD, got `{policy_name}`"
                )))
            }
        };
        policy
            .validate()
            .map_err(|e| CliError::invalid(format!("policy: {e}")))?;

        let replicas = raw
            .scalar("replicas", "a positive integer")?
            .unwrap_or(10_000);
        let cfg = ExperimentConfig {
            graph,
            generator,
            params: raw
                .parse_with("params", "comma-separated parameter schemes", |v| {
                    if v.is_empty() {
                        return Some(Vec::new());
                    }
                    v.split(',')
                        .map(|s| s.parse::<ParamScheme>().ok())
                        .collect()
                })?
                .unwrap_or_default(),
            params_seed: raw.scalar("params_seed", "an unsigned integer")?,
            model: raw
                .parse_with(
                    "model",
                    "one of IC, WC, LT, LT_LIVE_EDGE, OI_IC, OI_LT",
                    |v| v.parse().ok(),
                )?
                .unwrap_or(Model::OiIc),
            thresholds: raw
                .parse_with("thresholds", "graph or uniform", parse_thresholds)?
                .unwrap_or_default(),
            algorithm: raw
                .parse_with(
                    "algorithm",
                    "one of EASYIM, OSIM, MODIFIED_GREEDY, PATH_UNION",
                    |v| v.parse().ok(),
                )?
                .unwrap_or(Algorithm::Osim),
            algorithms: raw
                .parse_with(
                    "algorithms",
                    "a list of EASYIM, OSIM, MODIFIED_GREEDY, PATH_UNION",
                    |v| v.split(',').map(|a| a.parse().ok()).collect(),
                )?
                .unwrap_or_else(|| {
                    vec![
                        Algorithm::Easyim,
                        Algorithm::Osim,
                        Algorithm::ModifiedGreedy,
                    ]
                }),
            k: raw.list("k", "comma-separated positive integers")?,
            l: raw.scalar("l", "a positive integer")?.unwrap_or(3),
            clamp_l: raw
                .parse_with("clamp_l", "true or false", parse_bool)?
                .unwrap_or(true),
            diameter_samples: raw
                .scalar("diameter_samples", "a positive integer")?
                .unwrap_or(32),
            lambda: raw
                .list("lambda", "comma-separated non-negative numbers")?
                .unwrap_or_else(|| vec![1.0]),
            replicas,
            greedy_replicas: raw
                .scalar("greedy_replicas", "a positive integer")?
                .unwrap_or(replicas),
            evaluator: raw
                .parse_with("evaluator", "MONTE_CARLO, EXACT or AUTO", parse_evaluator)?
                .unwrap_or(Evaluator::MonteCarlo),
            policy,
            kinds: raw
                .parse_with(
                    "kinds",
                    "a list of SPREAD, OPINION_SPREAD, EFFECTIVE_OPINION_SPREAD",
                    |v| v.split(',').map(|x| x.parse().ok()).collect(),
                )?
                .unwrap_or_else(|| SpreadKind::ALL.to_vec()),
            seeds_file: raw.path("seeds"),
            master_seed: raw.scalar("master_seed", "an unsigned integer")?,
            output: raw.get("output").map(|(v, _)| PathBuf::from(v)),
        };
        cfg.check_ranges()?;
        Ok(cfg)
    }

    fn check_ranges(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::invalid(m));
        if self.l == 0 {
            return bad("`l` must be ≥ 1".into());
        }
        if self.replicas == 0 || self.greedy_replicas == 0 {
            return bad("`replicas` and `greedy_replicas` must be ≥ 1".into());
        }
        if self.diameter_samples == 0 {
            return bad("`diameter_samples` must be ≥ 1".into());
        }
        if let Some(k) = &self.k {
            if k.contains(&0) {
                return bad("`k` values must be ≥ 1".into());
            }
        }
        if self.lambda.is_empty() || self.lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return bad(format!(
                "`lambda` must list finite non-negative numbers, got {:?}",
                self.lambda
            ));
        }
        if self.kinds.is_empty() {
            return bad("`kinds` must not be empty".into());
        }
        if self.algorithms.is_empty() {
            return bad("`algorithms` must not be empty".into());
        }
        if let Some(GraphSource::File {
            path, attributes, ..
        }) = &self.graph
        {
            for p in std::iter::once(path).chain(attributes) {
                if !p.is_file() {
                    return bad(format!("graph file `{}` does not exist", p.display()));
                }
            }
        }
        if let Some(p) = &self.seeds_file {
            if !p.is_file() {
                return bad(format!("seeds file `{}` does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.master_seed.ok_or_else(|| {
            CliError::invalid("master_seed is not set (use --seed or `master_seed = ...`)")
        })
    }

    pub fn require_output(&self) -> CliResult<&Path> {
        self.output.as_deref().ok_or_else(|| {
            CliError::invalid("output prefix is not set (use --out or `output = ...`)")
        })
    }

    pub fn require_graph(&self) -> CliResult<&GraphSource> {
        self.graph.as_ref().ok_or_else(|| {
            CliError::invalid("no graph: set `graph = <edge list>` or `generator = <kind>`")
        })
    }

    /// Non-empty `k` list.
    pub fn require_k(&self) -> CliResult<&[usize]> {
        match &self.k {
            None => Err(CliError::invalid("`k` is not set")),
            Some(k) if k.is_empty() => Err(CliError::invalid("`k` list is empty")),
            Some(k) => Ok(k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> CliResult<ExperimentConfig> {
        ExperimentConfig::from_raw(&RawConfig::parse(text, "test")?)
    }

    #[test]
    fn defaults() {
        let c = cfg("generator = FIG1\n").unwrap();
        assert_eq!(c.l, 3);
        assert_eq!(c.lambda, vec![1.0]);
        assert_eq!(c.replicas, 10_000);
        assert_eq!(
            c.policy,
            DiscountPolicy::McThreshold {
                tau: 0.5,
                replicas: 100
            }
        );
        assert!(matches!(c.graph, Some(GraphSource::Generated(_))));
        assert!(c.require_seed().is_err());
    }

    #[test]
    fn lists_and_comments() {
        let c = cfg("k = 1, 5,10 # curve\nlambda=0,1\nparams = ic_uniform:0.2,opinion_uniform\n")
            .unwrap();
        assert_eq!(c.require_k().unwrap(), &[1, 5, 10]);
        assert_eq!(c.lambda, vec![0.0, 1.0]);
        assert_eq!(
            c.params,
            vec![ParamScheme::IcUniform(0.2), ParamScheme::OpinionUniform]
        );
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = cfg("k = a\n").unwrap_err().to_string();
        assert!(e.contains("test:1") && e.contains("`k`"), "{e}");
        let e = cfg("\nbogus = 1\n").unwrap_err().to_string();
        assert!(e.contains("test:2") && e.contains("bogus"), "{e}");
        assert!(cfg("k =\n").unwrap().require_k().is_err());
        assert!(cfg("tau = 0\n").is_err());
        assert!(cfg("graph = /definitely/missing.txt\n").is_err());
        assert!(cfg("model = XYZ\n").is_err());
    }

    #[test]
    fn subsets_syntax() {
        let c =
            cfg("generator = SETCOVER_REDUCTION\nelements = 3\nsubsets = 0 1 | 1 2 | 2\n").unwrap();
        assert_eq!(
            c.generator.unwrap().subsets,
            vec![vec![0, 1], vec![1, 2], vec![2]]
        );
    }
}
