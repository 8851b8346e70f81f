//! Text formats.
//!
//! * Edge list: one arc per line, `src dst [p [phi [w]]]`, whitespace separated.
//!   A line holding a single id declares an isolated node. Missing `p` is 0.1,
//!   missing `phi` is 1.0, missing `w` is `1 / |In(dst)|`.
//! * Node attributes: `id opinion [theta]`.
//! * Id mapping sidecar: `original_id dense_id`.
//!
//! Everything after `#` on a line is a comment. Original ids are arbitrary
//! tokens; when all of them are integers they are ranked numerically,
//! otherwise lexicographically, and the rank becomes the dense [`NodeId`].

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{check_unit, Graph, GraphBuilder, NodeAttrs, NodeId};
use crate::{Error, Result};

pub const DEFAULT_P: f64 = 0.1;
pub const DEFAULT_PHI: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Directedness {
    Directed,
    /// Each line yields both arcs with identical parameters.
    Undirected,
}

/// Dense index ↔ original id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl IdMap {
    pub fn from_labels(labels: Vec<String>) -> Self {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), NodeId::new(i)))
            .collect();
        IdMap { labels, index }
    }

    /// `0..n` labelled by their own index.
    pub fn identity(n: usize) -> Self {
        IdMap::from_labels((0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn lookup(&self, original: &str) -> Option<NodeId> {
        self.index.get(original).copied()
    }

    pub fn resolve(&self, original: &str) -> Result<NodeId> {
        self.lookup(original)
            .ok_or_else(|| Error::UnknownNode(original.to_string()))
    }

    /// True when every label equals its dense index.
    pub fn is_identity(&self) -> bool {
        self.labels
            .iter()
            .enumerate()
            .all(|(i, l)| *l == i.to_string())
    }

    pub fn write_sidecar(&self, path: &Path) -> Result<()> {
        let mut out = String::from("# original_id dense_id\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("{l} {i}\n"));
        }
        fs::write(path, out)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: IdMap,
    /// Arcs dropped because an earlier line already declared them.
    pub duplicates: usize,
}

fn content(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_unit(tok: &str, name: &'static str, line: usize, lo: f64, hi: f64) -> Result<f64> {
    let value: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {name} from `{tok}`"),
    })?;
    check_unit(name, value, lo, hi).map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })
}

fn rank_ids(tokens: impl IntoIterator<Item = String>) -> IdMap {
    let mut uniq: Vec<String> = tokens.into_iter().collect();
    uniq.sort();
    uniq.dedup();
    let numeric: Option<Vec<u64>> = uniq.iter().map(|t| t.parse::<u64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut pairs: Vec<(u64, String)> = nums.into_iter().zip(uniq).collect();
        pairs.sort_by_key(|p| p.0);
        uniq = pairs.into_iter().map(|p| p.1).collect();
    }
    IdMap::from_labels(uniq)
}

struct RawArc<'a> {
    line: usize,
    src: &'a str,
    dst: &'a str,
    p: f64,
    phi: f64,
    w: Option<f64>,
}

/// Parses an edge list from text.
pub fn parse_edge_list(text: &str, directedness: Directedness) -> Result<LoadedGraph> {
    let mut arcs = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let cols: Vec<&str> = content(raw).split_whitespace().collect();
        match cols.len() {
            0 => continue,
            1 => tokens.push(cols[0].to_string()),
            2..=5 => {
                if cols[0] == cols[1] {
                    return Err(Error::Parse {
                        line,
                        msg: format!("self-loop on node `{}`", cols[0]),
                    });
                }
                let p = cols
                    .get(2)
                    .map_or(Ok(DEFAULT_P), |t| parse_unit(t, "p", line, 0.0, 1.0))?;
                let phi = cols
                    .get(3)
                    .map_or(Ok(DEFAULT_PHI), |t| parse_unit(t, "phi", line, 0.0, 1.0))?;
                let w = cols
                    .get(4)
                    .map(|t| parse_unit(t, "w", line, 0.0, 1.0))
                    .transpose()?;
                tokens.push(cols[0].to_string());
                tokens.push(cols[1].to_string());
                arcs.push(RawArc {
                    line,
                    src: cols[0],
                    dst: cols[1],
                    p,
                    phi,
                    w,
                });
            }
            k => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `src dst [p [phi [w]]]`, found {k} columns"),
                })
            }
        }
    }

    let ids = rank_ids(tokens);
    let mut b = GraphBuilder::new(ids.len());
    let mut add = |a: &RawArc, s: &str, d: &str| -> Result<()> {
        let (s, d) = (ids.resolve(s)?, ids.resolve(d)?);
        let fresh = match a.w {
            Some(w) => b.add_weighted_edge(s, d, a.p, a.phi, w)?,
            None => b.add_edge(s, d, a.p, a.phi)?,
        };
        if !fresh {
            log::warn!(
                "line {}: duplicate arc {} -> {} ignored",
                a.line,
                ids.label(s),
                ids.label(d)
            );
        }
        Ok(())
    };
    for a in &arcs {
        add(a, a.src, a.dst)?;
        if directedness == Directedness::Undirected {
            add(a, a.dst, a.src)?;
        }
    }
    let duplicates = b.duplicates();
    Ok(LoadedGraph {
        graph: b.build(),
        ids,
        duplicates,
    })
}

pub fn load_edge_list(path: &Path, directedness: Directedness) -> Result<LoadedGraph> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, directedness)
}

/// Applies an `id opinion [theta]` file. Ids must already exist in `ids`.
pub fn parse_attributes(text: &str, graph: &Graph, ids: &IdMap) -> Result<Graph> {
    let mut attrs: Vec<NodeAttrs> = graph.all_attrs().to_vec();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let cols: Vec<&str> = content(raw).split_whitespace().collect();
        if cols.is_empty() {
            continue;
        }
        if !(2..=3).contains(&cols.len()) {
            return Err(Error::Parse {
                line,
                msg: format!(
                    "expected `id opinion [theta]`, found {} columns",
                    cols.len()
                ),
            });
        }
        let v = ids.lookup(cols[0]).ok_or_else(|| Error::Parse {
            line,
            msg: format!("unknown node `{}`", cols[0]),
        })?;
        let a = &mut attrs[v.index()];
        a.opinion = parse_unit(cols[1], "opinion", line, -1.0, 1.0)?;
        if let Some(t) = cols.get(2) {
            a.theta = parse_unit(t, "theta", line, 0.0, 1.0)?;
        }
    }
    graph.map_attrs(|v, _| attrs[v.index()])
}

pub fn load_attributes(path: &Path, graph: &Graph, ids: &IdMap) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    parse_attributes(&text, graph, ids)
}

/// Writes `src dst p phi w` lines (plus isolated-node declarations).
pub fn write_edge_list(out: &mut impl Write, graph: &Graph, ids: &IdMap) -> Result<()> {
    writeln!(out, "# src dst p phi w")?;
    for v in graph.nodes() {
        if graph.out_degree(v) == 0 && graph.in_degree(v) == 0 {
            writeln!(out, "{}", ids.label(v))?;
        }
    }
    for e in graph.edges() {
        writeln!(
            out,
            "{} {} {} {} {}",
            ids.label(e.src),
            ids.label(e.dst),
            e.p,
            e.phi,
            e.w
        )?;
    }
    Ok(())
}

pub fn write_attributes(out: &mut impl Write, graph: &Graph, ids: &IdMap) -> Result<()> {
    writeln!(out, "# id opinion theta")?;
    for v in graph.nodes() {
        let a = graph.attrs(v);
        writeln!(out, "{} {} {}", ids.label(v), a.opinion, a.theta)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_NODE: &str =
        "# four-node example\nB A 0.1 0.7\nB C 0.1 0.8\nA D 0.8 0.9\nC D 0.9 0.1\n";

    #[test]
    fn loads_four_node() {
        let lg = parse_edge_list(FOUR_NODE, Directedness::Directed).unwrap();
        let g = &lg.graph;
        assert_eq!((g.n(), g.m()), (4, 4));
        let b = lg.ids.resolve("B").unwrap();
        let out: Vec<&str> = g.out_arcs(b).map(|(_, e)| lg.ids.label(e.dst)).collect();
        assert_eq!(out, vec!["A", "C"]);
        let ad = g
            .find_edge(lg.ids.resolve("A").unwrap(), lg.ids.resolve("D").unwrap())
            .unwrap();
        assert_eq!((g.edge(ad).p, g.edge(ad).phi), (0.8, 0.9));
    }

    #[test]
    fn empty_file() {
        let lg = parse_edge_list("", Directedness::Directed).unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (0, 0));
        let lg = parse_edge_list("# only a comment\n\n", Directedness::Undirected).unwrap();
        assert_eq!(lg.graph.n(), 0);
    }

    #[test]
    fn undirected_single_line() {
        let lg = parse_edge_list("0 1", Directedness::Undirected).unwrap();
        let g = &lg.graph;
        assert_eq!(g.m(), 2);
        assert!(g.find_edge(NodeId(0), NodeId(1)).is_some());
        assert!(g.find_edge(NodeId(1), NodeId(0)).is_some());
        assert_eq!(g.edge(0).p, DEFAULT_P);
        assert_eq!(g.edge(0).phi, DEFAULT_PHI);
    }

    #[test]
    fn sparse_ids_are_compacted_numerically() {
        let lg = parse_edge_list("100 7\n7 20 0.5\n", Directedness::Directed).unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.ids.label(NodeId(0)), "7");
        assert_eq!(lg.ids.label(NodeId(1)), "20");
        assert_eq!(lg.ids.label(NodeId(2)), "100");
        assert!(!lg.ids.is_identity());
        let dense = parse_edge_list("0 1\n1 2\n", Directedness::Directed).unwrap();
        assert!(dense.ids.is_identity());
        assert_eq!(dense.graph.n(), 3);
    }

    #[test]
    fn isolated_declaration() {
        let lg = parse_edge_list("5\n0 1\n", Directedness::Directed).unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.graph.m(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_edge_list("0 1\n1 x2 abc\n", Directedness::Directed).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("0 1\n\n3 3\n", Directedness::Directed).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("0 1 1.2\n", Directedness::Directed).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_edge_list("0 1 0.5 -0.1\n", Directedness::Directed).unwrap_err();
        assert!(err.to_string().contains("phi"), "{err}");
        let err = parse_edge_list("0 1 0.5 0.5 0.5 9\n", Directedness::Directed).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_keeps_first() {
        let lg = parse_edge_list("0 1 0.3\n0 1 0.9\n", Directedness::Directed).unwrap();
        assert_eq!(lg.duplicates, 1);
        assert_eq!(lg.graph.m(), 1);
        assert_eq!(lg.graph.edge(0).p, 0.3);
    }

    #[test]
    fn attributes_apply_and_validate() {
        let lg = parse_edge_list(FOUR_NODE, Directedness::Directed).unwrap();
        let g = parse_attributes("A 0.8\nD -0.3 0.25 # trailing\n", &lg.graph, &lg.ids).unwrap();
        let a = lg.ids.resolve("A").unwrap();
        let d = lg.ids.resolve("D").unwrap();
        assert_eq!(g.opinion(a), 0.8);
        assert_eq!((g.opinion(d), g.theta(d)), (-0.3, 0.25));
        assert!(parse_attributes("Z 0.1\n", &lg.graph, &lg.ids).is_err());
        assert!(parse_attributes("A 1.5\n", &lg.graph, &lg.ids).is_err());
    }

    #[test]
    fn write_then_read_preserves_graph() {
        let fx = super::super::generate::four_node();
        let mut edges = Vec::new();
        write_edge_list(&mut edges, &fx.graph, &fx.ids).unwrap();
        let mut attrs = Vec::new();
        write_attributes(&mut attrs, &fx.graph, &fx.ids).unwrap();
        let lg =
            parse_edge_list(std::str::from_utf8(&edges).unwrap(), Directedness::Directed).unwrap();
        let g = parse_attributes(std::str::from_utf8(&attrs).unwrap(), &lg.graph, &lg.ids).unwrap();
        assert_eq!(g, fx.graph);
        assert_eq!(lg.ids, fx.ids);
    }
}
