//! The four subcommands. Every output file starts with a schema line; wall
//! clock timings go to a separate `*.timing.csv` so that the result files are
//! byte-identical across runs and thread counts.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use osim_core::diffusion::DiffusionSpec;
use osim_core::graph::{
    assign_all, diameter_estimate, generate, load_attributes, load_edge_list, write_attributes,
    write_edge_list, Directedness, IdMap,
};
use osim_core::scoring::ScoreMode;
use osim_core::select::{
    derive_seed, modified_greedy, seed_select, GreedyConfig, Scorer, SeedSelectionReport,
    SelectConfig,
};
use osim_core::spread::{fixtures, mc_estimate_all};
use osim_core::{Execution, Graph, NodeId};
use serde::Serialize;

use crate::config::{Algorithm, ExperimentConfig, GeneratorKind, GeneratorSpec, GraphSource};
use crate::error::{CliError, CliResult};

const SALT_PARAMS: u64 = 1;
const SALT_DIAMETER: u64 = 2;
const SALT_SELECT: u64 = 3;
const SALT_EVALUATE: u64 = 4;

/// A graph with its printable labels.
pub struct Network {
    pub graph: Graph,
    pub ids: IdMap,
}

#[derive(Default)]
struct Timings(Vec<(String, f64)>);

impl Timings {
    fn time<T>(&mut self, phase: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0
            .push((phase.into(), start.elapsed().as_secs_f64() * 1e3));
        out
    }

    fn render(&self) -> String {
        let mut s = String::from("# schema: osim-timing/1\nphase,wall_ms\n");
        for (phase, ms) in &self.0 {
            let _ = writeln!(s, "{phase},{ms:.3}");
        }
        s
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Runtime(format!("cannot write `{}`: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

pub fn generate_network(spec: &GeneratorSpec, seed: u64) -> CliResult<Network> {
    Ok(match spec.kind {
        GeneratorKind::FourNode => {
            let fx = generate::four_node();
            Network {
                graph: fx.graph,
                ids: fx.ids,
            }
        }
        GeneratorKind::Er => {
            let g = generate::erdos_renyi(spec.n, spec.q, seed)?;
            Network {
                ids: IdMap::identity(g.n()),
                graph: g,
            }
        }
        GeneratorKind::Tree => {
            let g = generate::complete_tree(spec.depth, spec.branching, spec.p)?;
            Network {
                ids: IdMap::identity(g.n()),
                graph: g,
            }
        }
        GeneratorKind::BipartiteCounterexample => {
            let g = fixtures::bipartite_fixture(spec.nx, spec.ny)?.graph;
            Network {
                ids: IdMap::identity(g.n()),
                graph: g,
            }
        }
        GeneratorKind::SetcoverReduction => {
            let g = fixtures::set_cover_fixture(spec.elements, &spec.subsets)?.graph;
            Network {
                ids: IdMap::identity(g.n()),
                graph: g,
            }
        }
    })
}

/// Loads or generates the configured graph and applies the parameter schemes.
pub fn load_network(cfg: &ExperimentConfig, master_seed: u64) -> CliResult<Network> {
    let net = match cfg.require_graph()? {
        GraphSource::File {
            path,
            attributes,
            directed,
        } => {
            let dir = if *directed {
                Directedness::Directed
            } else {
                Directedness::Undirected
            };
            let loaded = load_edge_list(path, dir)?;
            if loaded.duplicates > 0 {
                log::warn!(
                    "{}: {} duplicate arcs ignored",
                    path.display(),
                    loaded.duplicates
                );
            }
            let graph = match attributes {
                Some(a) => load_attributes(a, &loaded.graph, &loaded.ids)?,
                None => loaded.graph,
            };
            Network {
                graph,
                ids: loaded.ids,
            }
        }
        GraphSource::Generated(spec) => generate_network(spec, master_seed)?,
    };
    let seed = cfg
        .params_seed
        .unwrap_or_else(|| derive_seed(master_seed, SALT_PARAMS));
    let graph = assign_all(&net.graph, &cfg.params, seed)?;
    Ok(Network {
        graph,
        ids: net.ids,
    })
}

fn diffusion_spec(cfg: &ExperimentConfig, lambda: f64) -> DiffusionSpec {
    DiffusionSpec::new(cfg.model)
        .with_lambda(lambda)
        .with_thresholds(cfg.thresholds)
}

/// `l`, clamped to the estimated diameter when `clamp_l` is set.
fn effective_l(cfg: &ExperimentConfig, g: &Graph, master_seed: u64) -> CliResult<usize> {
    if !cfg.clamp_l {
        return Ok(cfg.l);
    }
    let d = diameter_estimate(
        g,
        cfg.diameter_samples,
        derive_seed(master_seed, SALT_DIAMETER),
    )?;
    let l = cfg.l.min(d.max(1));
    if l < cfg.l {
        log::info!("l = {} clamped to diameter estimate {l}", cfg.l);
    }
    Ok(l)
}

fn check_k(k: usize, g: &Graph) -> CliResult<()> {
    if k > g.n() {
        return Err(CliError::invalid(format!(
            "k = {k} exceeds the node count {}",
            g.n()
        )));
    }
    Ok(())
}

fn run_selection(
    cfg: &ExperimentConfig,
    net: &Network,
    algorithm: Algorithm,
    k: usize,
    l: usize,
    master_seed: u64,
) -> CliResult<SeedSelectionReport> {
    check_k(k, &net.graph)?;
    let spec = diffusion_spec(cfg, cfg.lambda[0]);
    let seed = derive_seed(master_seed, SALT_SELECT);
    let scorer = match algorithm {
        Algorithm::Easyim => Scorer::Assign(ScoreMode::OpinionOblivious),
        Algorithm::Osim => Scorer::Assign(ScoreMode::OpinionAware),
        Algorithm::PathUnion => Scorer::PathUnion,
        Algorithm::ModifiedGreedy => {
            let mut report = modified_greedy(
                &net.graph,
                &GreedyConfig {
                    k,
                    spec,
                    replicas: cfg.greedy_replicas,
                    master_seed: seed,
                    evaluator: cfg.evaluator,
                    exec: Execution::Parallel,
                },
            )?;
            report
                .config
                .insert("master_seed".into(), master_seed.to_string());
            return Ok(report);
        }
    };
    let mut report = seed_select(
        &net.graph,
        &SelectConfig {
            k,
            l,
            scorer,
            spec,
            policy: cfg.policy,
            master_seed: seed,
            exec: Execution::Parallel,
        },
    )?;
    report
        .config
        .insert("master_seed".into(), master_seed.to_string());
    report
        .config
        .insert("l_requested".into(), cfg.l.to_string());
    Ok(report)
}

#[derive(Serialize)]
struct JsonIteration<'a> {
    k: usize,
    seed: &'a str,
    score: f64,
    activated: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: &'static str,
    algorithm: &'a str,
    seeds: Vec<&'a str>,
    per_iteration: Vec<JsonIteration<'a>>,
    config: &'a BTreeMap<String, String>,
}

fn report_json(report: &SeedSelectionReport, ids: &IdMap) -> CliResult<Vec<u8>> {
    let doc = JsonReport {
        schema: "osim-report/1",
        algorithm: &report.algorithm,
        seeds: report.seeds.iter().map(|&v| ids.label(v)).collect(),
        per_iteration: report
            .per_iteration
            .iter()
            .map(|r| JsonIteration {
                k: r.iteration,
                seed: ids.label(r.node),
                score: r.score,
                activated: r.activated,
            })
            .collect(),
        config: &report.config,
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes the graph as edge list, attribute file and id sidecar.
pub fn cmd_generate(cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    let master_seed = cfg.require_seed()?;
    let out = cfg.require_output()?;
    if cfg.generator.is_none() {
        return Err(CliError::invalid("`generator` is not set"));
    }
    let mut timings = Timings::default();
    let net = timings.time("generate", || load_network(cfg, master_seed))?;

    let mut edges = b"# schema: osim-edges/1\n".to_vec();
    write_edge_list(&mut edges, &net.graph, &net.ids)?;
    let mut attrs = b"# schema: osim-attrs/1\n".to_vec();
    write_attributes(&mut attrs, &net.graph, &net.ids)?;
    let mut ids = b"# schema: osim-ids/1\n# original_id dense_id\n".to_vec();
    for v in net.graph.nodes() {
        writeln!(ids, "{} {}", net.ids.label(v), v.index())?;
    }
    Ok(vec![
        write_file(&with_suffix(out, ".edges"), &edges)?,
        write_file(&with_suffix(out, ".attrs"), &attrs)?,
        write_file(&with_suffix(out, ".ids"), &ids)?,
        write_file(
            &with_suffix(out, ".timing.csv"),
            timings.render().as_bytes(),
        )?,
    ])
}

/// Runs the configured algorithm for the largest `k`; writes a JSON report and
/// a `k,seed,score,activated` CSV.
pub fn cmd_select(cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    let master_seed = cfg.require_seed()?;
    let out = cfg.require_output()?;
    let k_max = *cfg.require_k()?.iter().max().expect("non-empty");
    let mut timings = Timings::default();
    let net = timings.time("load", || load_network(cfg, master_seed))?;
    check_k(k_max, &net.graph)?;
    let l = effective_l(cfg, &net.graph, master_seed)?;
    let report = timings.time("selection", || {
        run_selection(cfg, &net, cfg.algorithm, k_max, l, master_seed)
    })?;

    let mut csv = Vec::new();
    report.write_csv(&mut csv, &net.ids)?;
    Ok(vec![
        write_file(&with_suffix(out, ".json"), &report_json(&report, &net.ids)?)?,
        write_file(&with_suffix(out, ".csv"), &csv)?,
        write_file(
            &with_suffix(out, ".timing.csv"),
            timings.render().as_bytes(),
        )?,
    ])
}

/// Seed labels from a file: whitespace separated, `#` comments.
pub fn read_seeds(path: &Path, ids: &IdMap) -> CliResult<Vec<NodeId>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read seeds `{}`: {e}", path.display())))?;
    let mut seeds = Vec::new();
    for line in text.lines() {
        for tok in line.split('#').next().unwrap_or("").split_whitespace() {
            let v = ids.resolve(tok)?;
            if seeds.contains(&v) {
                return Err(CliError::invalid(format!("seed `{tok}` listed twice")));
            }
            seeds.push(v);
        }
    }
    if seeds.is_empty() {
        return Err(CliError::invalid(format!(
            "seeds file `{}` lists no nodes",
            path.display()
        )));
    }
    Ok(seeds)
}

const SPREAD_HEADER: &str = "k,kind,lambda,mean,std_error,replicas";

fn spread_rows(
    cfg: &ExperimentConfig,
    net: &Network,
    seeds: &[NodeId],
    ks: &[usize],
    master_seed: u64,
    prefix: &str,
    out: &mut String,
) -> CliResult<()> {
    let seed = derive_seed(master_seed, SALT_EVALUATE);
    for &k in ks {
        for &lambda in &cfg.lambda {
            let spec = diffusion_spec(cfg, lambda);
            let est = mc_estimate_all(
                &net.graph,
                &seeds[..k],
                &spec,
                cfg.replicas,
                seed,
                Execution::Parallel,
            )?;
            for &kind in &cfg.kinds {
                let e = est.get(kind);
                let _ = writeln!(
                    out,
                    "{prefix}{k},{kind},{lambda},{},{},{}",
                    e.mean, e.std_error, e.replicas
                );
            }
        }
    }
    Ok(())
}

/// Monte-Carlo spread of the seed-file prefixes of every configured size.
pub fn cmd_evaluate(
    cfg: &ExperimentConfig,
    seeds_override: Option<&Path>,
) -> CliResult<Vec<PathBuf>> {
    let master_seed = cfg.require_seed()?;
    let out = cfg.require_output()?;
    let seeds_path = seeds_override
        .or(cfg.seeds_file.as_deref())
        .ok_or_else(|| CliError::invalid("no seeds file (use --seeds or `seeds = ...`)"))?;
    let mut timings = Timings::default();
    let net = timings.time("load", || load_network(cfg, master_seed))?;
    let seeds = read_seeds(seeds_path, &net.ids)?;
    let ks: Vec<usize> = match &cfg.k {
        Some(k) if k.is_empty() => return Err(CliError::invalid("`k` list is empty")),
        Some(k) => k.clone(),
        None => vec![seeds.len()],
    };
    if let Some(&bad) = ks.iter().find(|&&k| k > seeds.len()) {
        return Err(CliError::invalid(format!(
            "k = {bad} exceeds the {} listed seeds",
            seeds.len()
        )));
    }
    let mut csv = format!(
        "# schema: osim-spread/1 model={}\n{SPREAD_HEADER}\n",
        cfg.model
    );
    timings.time("evaluation", || {
        spread_rows(cfg, &net, &seeds, &ks, master_seed, "", &mut csv)
    })?;
    Ok(vec![
        write_file(&with_suffix(out, ".csv"), csv.as_bytes())?,
        write_file(
            &with_suffix(out, ".timing.csv"),
            timings.render().as_bytes(),
        )?,
    ])
}

/// Selects seeds with every configured algorithm and evaluates each prefix
/// with common random numbers.
pub fn cmd_compare(cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    let master_seed = cfg.require_seed()?;
    let out = cfg.require_output()?;
    let ks = cfg.require_k()?.to_vec();
    let k_max = *ks.iter().max().expect("non-empty");
    let mut timings = Timings::default();
    let net = timings.time("load", || load_network(cfg, master_seed))?;
    check_k(k_max, &net.graph)?;
    let l = effective_l(cfg, &net.graph, master_seed)?;

    let mut spread = format!(
        "# schema: osim-compare/1 model={}\nalgorithm,{SPREAD_HEADER}\n",
        cfg.model
    );
    let mut seeds_csv = String::from("# schema: osim-compare-seeds/1\nalgorithm,k,seed,score\n");
    for &alg in &cfg.algorithms {
        let report = timings.time(format!("selection:{alg}"), || {
            run_selection(cfg, &net, alg, k_max, l, master_seed)
        })?;
        for r in &report.per_iteration {
            let _ = writeln!(
                seeds_csv,
                "{alg},{},{},{}",
                r.iteration,
                net.ids.label(r.node),
                r.score
            );
        }
        timings.time(format!("evaluation:{alg}"), || {
            spread_rows(
                cfg,
                &net,
                &report.seeds,
                &ks,
                master_seed,
                &format!("{alg},"),
                &mut spread,
            )
        })?;
    }
    Ok(vec![
        write_file(&with_suffix(out, ".csv"), spread.as_bytes())?,
        write_file(&with_suffix(out, ".seeds.csv"), seeds_csv.as_bytes())?,
        write_file(
            &with_suffix(out, ".timing.csv"),
            timings.render().as_bytes(),
        )?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_raw(&RawConfig::parse(text, "test").unwrap()).unwrap()
    }

    #[test]
    fn suffixes_append() {
        assert_eq!(
            with_suffix(Path::new("out/run"), ".csv"),
            PathBuf::from("out/run.csv")
        );
    }

    #[test]
    fn four_node_selection_in_memory() {
        let c = cfg("generator = FIG1\nk = 1\nl = 2\nmaster_seed = 1\n");
        let net = load_network(&c, 1).unwrap();
        let osim = run_selection(&c, &net, Algorithm::Osim, 1, 2, 1).unwrap();
        assert_eq!(net.ids.label(osim.seeds[0]), "A");
        let easy = run_selection(&c, &net, Algorithm::Easyim, 1, 2, 1).unwrap();
        assert_eq!(net.ids.label(easy.seeds[0]), "C");
    }

    #[test]
    fn l_is_clamped_to_diameter() {
        let c = cfg("generator = FIG1\nl = 5\n");
        let net = load_network(&c, 0).unwrap();
        assert_eq!(effective_l(&c, &net.graph, 0).unwrap(), 2);
        let c = cfg("generator = FIG1\nl = 5\nclamp_l = false\n");
        assert_eq!(effective_l(&c, &net.graph, 0).unwrap(), 5);
    }

    #[test]
    fn json_starts_with_schema() {
        let c = cfg("generator = FIG1\n");
        let net = load_network(&c, 0).unwrap();
        let r = run_selection(&c, &net, Algorithm::Osim, 2, 2, 0).unwrap();
        let text = String::from_utf8(report_json(&r, &net.ids).unwrap()).unwrap();
        assert!(
            text.starts_with("{\n  \"schema\": \"osim-report/1\""),
            "{text}"
        );
    }
}
