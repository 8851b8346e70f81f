//! The network `G(V, E)` with all diffusion parameters.
//!
//! A [`Graph`] is immutable once built. Arcs are stored once, sorted by
//! `(src, dst)`, and addressed by [`EdgeId`]; the in-adjacency is an index
//! permutation sorted by `(dst, src)`. Both orders are therefore ascending in
//! the neighbour id, which fixes the coin order of every cascade.

pub mod diameter;
pub mod generate;
pub mod io;
pub mod params;

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use diameter::diameter_estimate;
pub use io::{
    load_attributes, load_edge_list, write_attributes, write_edge_list, Directedness, IdMap,
    LoadedGraph,
};
pub use params::{assign_all, assign_parameters, ParamScheme};

/// Dense node index in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn new(index: usize) -> Self {
        NodeId(index as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of an arc in [`Graph::edges`].
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// IC influence probability.
    pub p: f64,
    /// LT weight.
    pub w: f64,
    /// Interaction probability: chance that `dst` adopts the orientation of `src`.
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeAttrs {
    pub opinion: f64,
    pub theta: f64,
}

impl Default for NodeAttrs {
    fn default() -> Self {
        NodeAttrs {
            opinion: 0.0,
            theta: 0.5,
        }
    }
}

/// Which arc attribute plays the role of the propagation probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeWeight {
    /// `p_(u,v)`.
    P,
    /// `w_(u,v)`, the LT / live-edge weight.
    W,
    /// Weighted cascade: `1 / |In(v)|`, derived from the topology.
    InverseInDegree,
}

pub(crate) fn check_unit(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    attrs: Vec<NodeAttrs>,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_edges: Vec<u32>,
}

impl Graph {
    /// Graph with `n` isolated nodes and default attributes.
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.attrs.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).map(NodeId::new)
    }

    #[inline]
    pub fn attrs(&self, v: NodeId) -> &NodeAttrs {
        &self.attrs[v.index()]
    }

    pub fn all_attrs(&self) -> &[NodeAttrs] {
        &self.attrs
    }

    #[inline]
    pub fn opinion(&self, v: NodeId) -> f64 {
        self.attrs[v.index()].opinion
    }

    #[inline]
    pub fn theta(&self, v: NodeId) -> f64 {
        self.attrs[v.index()].theta
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    #[inline]
    pub fn out_edge_ids(&self, u: NodeId) -> Range<EdgeId> {
        self.out_offsets[u.index()]..self.out_offsets[u.index() + 1]
    }

    /// Arcs leaving `u`, ascending by destination.
    pub fn out_arcs(&self, u: NodeId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        let r = self.out_edge_ids(u);
        self.edges[r.clone()]
            .iter()
            .enumerate()
            .map(move |(i, e)| (r.start + i, e))
    }

    /// Edge ids of the arcs entering `v`, ascending by source.
    #[inline]
    pub fn in_edge_ids(&self, v: NodeId) -> &[u32] {
        &self.in_edges[self.in_offsets[v.index()]..self.in_offsets[v.index() + 1]]
    }

    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.in_edge_ids(v)
            .iter()
            .map(move |&e| (e as EdgeId, &self.edges[e as usize]))
    }

    #[inline]
    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_offsets[u.index() + 1] - self.out_offsets[u.index()]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v.index() + 1] - self.in_offsets[v.index()]
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let r = self.out_edge_ids(u);
        self.edges[r.clone()]
            .binary_search_by_key(&v, |e| e.dst)
            .ok()
            .map(|i| r.start + i)
    }

    /// Propagation probability of arc `e` under the chosen attribute.
    #[inline]
    pub fn weight(&self, e: EdgeId, which: EdgeWeight) -> f64 {
        let edge = &self.edges[e];
        match which {
            EdgeWeight::P => edge.p,
            EdgeWeight::W => edge.w,
            EdgeWeight::InverseInDegree => 1.0 / self.in_degree(edge.dst) as f64,
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.n()
    }

    pub fn check_node(&self, v: NodeId) -> Result<NodeId> {
        if self.contains(v) {
            Ok(v)
        } else {
            Err(Error::NodeOutOfRange {
                node: v,
                n: self.n(),
            })
        }
    }

    /// Same topology with every arc rewritten by `f`. Ranges are re-checked and
    /// LT in-weights renormalised as in [`GraphBuilder::build`].
    pub fn map_edges(&self, mut f: impl FnMut(EdgeId, &Edge) -> Edge) -> Result<Graph> {
        let mut g = self.clone();
        for (i, e) in self.edges.iter().enumerate() {
            let new = f(i, e);
            debug_assert_eq!((new.src, new.dst), (e.src, e.dst));
            check_unit("p", new.p, 0.0, 1.0)?;
            check_unit("w", new.w, 0.0, 1.0)?;
            check_unit("phi", new.phi, 0.0, 1.0)?;
            g.edges[i] = Edge {
                src: e.src,
                dst: e.dst,
                ..new
            };
        }
        g.normalize_lt_weights();
        Ok(g)
    }

    /// Same topology with every node's attributes rewritten by `f`.
    pub fn map_attrs(&self, mut f: impl FnMut(NodeId, &NodeAttrs) -> NodeAttrs) -> Result<Graph> {
        let mut g = self.clone();
        for (i, a) in self.attrs.iter().enumerate() {
            let new = f(NodeId::new(i), a);
            check_unit("opinion", new.opinion, -1.0, 1.0)?;
            check_unit("theta", new.theta, 0.0, 1.0)?;
            g.attrs[i] = new;
        }
        Ok(g)
    }

    /// Rescales incoming LT weights of every node whose sum exceeds 1.
    fn normalize_lt_weights(&mut self) {
        for v in 0..self.n() {
            let ids = &self.in_edges[self.in_offsets[v]..self.in_offsets[v + 1]];
            let total: f64 = ids.iter().map(|&e| self.edges[e as usize].w).sum();
            if total > 1.0 {
                for &e in ids {
                    self.edges[e as usize].w /= total;
                }
            }
        }
    }

    /// Read-only view with nothing masked.
    pub fn view(&self) -> GraphView<'_> {
        GraphView {
            graph: self,
            mask: NodeMask::new(self.n()),
        }
    }
}

/// Incremental construction of a [`Graph`].
///
/// Duplicate arcs keep the first occurrence. Arcs without an explicit LT
/// weight get `1 / |In(v)|`; incoming weights summing above 1 are rescaled.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    attrs: Vec<NodeAttrs>,
    arcs: Vec<(u32, u32, f64, f64, Option<f64>)>,
    seen: HashSet<(u32, u32)>,
    duplicates: usize,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            attrs: vec![NodeAttrs::default(); n],
            arcs: Vec::new(),
            seen: HashSet::new(),
            duplicates: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.attrs.len()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn set_attrs(&mut self, v: NodeId, attrs: NodeAttrs) -> Result<&mut Self> {
        self.check(v)?;
        check_unit("opinion", attrs.opinion, -1.0, 1.0)?;
        check_unit("theta", attrs.theta, 0.0, 1.0)?;
        self.attrs[v.index()] = attrs;
        Ok(self)
    }

    pub fn set_opinion(&mut self, v: NodeId, opinion: f64) -> Result<&mut Self> {
        self.check(v)?;
        self.attrs[v.index()].opinion = check_unit("opinion", opinion, -1.0, 1.0)?;
        Ok(self)
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v.index() < self.n() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: v,
                n: self.n(),
            })
        }
    }

    /// Adds `src -> dst`. Returns `false` when the arc already existed.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, p: f64, phi: f64) -> Result<bool> {
        self.push(src, dst, p, phi, None)
    }

    pub fn add_weighted_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        p: f64,
        phi: f64,
        w: f64,
    ) -> Result<bool> {
        self.push(src, dst, p, phi, Some(w))
    }

    fn push(&mut self, src: NodeId, dst: NodeId, p: f64, phi: f64, w: Option<f64>) -> Result<bool> {
        self.check(src)?;
        self.check(dst)?;
        if src == dst {
            return Err(Error::SelfLoop(src.to_string()));
        }
        check_unit("p", p, 0.0, 1.0)?;
        check_unit("phi", phi, 0.0, 1.0)?;
        if let Some(w) = w {
            check_unit("w", w, 0.0, 1.0)?;
        }
        if !self.seen.insert((src.0, dst.0)) {
            self.duplicates += 1;
            return Ok(false);
        }
        self.arcs.push((src.0, dst.0, p, phi, w));
        Ok(true)
    }

    pub fn build(mut self) -> Graph {
        let n = self.attrs.len();
        self.arcs.sort_unstable_by_key(|a| (a.0, a.1));

        let mut in_deg = vec![0usize; n];
        for a in &self.arcs {
            in_deg[a.1 as usize] += 1;
        }
        let edges: Vec<Edge> = self
            .arcs
            .iter()
            .map(|&(s, d, p, phi, w)| Edge {
                src: NodeId(s),
                dst: NodeId(d),
                p,
                phi,
                w: w.unwrap_or(1.0 / in_deg[d as usize] as f64),
            })
            .collect();

        let mut out_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.src.index() + 1] += 1;
        }
        let mut in_offsets = vec![0usize; n + 1];
        for v in 0..n {
            out_offsets[v + 1] += out_offsets[v];
            in_offsets[v + 1] = in_offsets[v] + in_deg[v];
        }
        let mut in_edges: Vec<u32> = (0..edges.len() as u32).collect();
        in_edges.sort_unstable_by_key(|&e| (edges[e as usize].dst, edges[e as usize].src));

        let mut g = Graph {
            attrs: self.attrs,
            edges,
            out_offsets,
            in_offsets,
            in_edges,
        };
        g.normalize_lt_weights();
        g
    }
}

/// Set of nodes excluded from a [`GraphView`] (the already-active set `V_(a)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMask {
    excluded: Vec<bool>,
    count: usize,
}

impl NodeMask {
    pub fn new(n: usize) -> Self {
        NodeMask {
            excluded: vec![false; n],
            count: 0,
        }
    }

    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut mask = NodeMask::new(n);
        for v in nodes {
            mask.insert(v)?;
        }
        Ok(mask)
    }

    /// Returns `true` when `v` was not already excluded.
    pub fn insert(&mut self, v: NodeId) -> Result<bool> {
        let n = self.excluded.len();
        let slot = self
            .excluded
            .get_mut(v.index())
            .ok_or(Error::NodeOutOfRange { node: v, n })?;
        if *slot {
            return Ok(false);
        }
        *slot = true;
        self.count += 1;
        Ok(true)
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.excluded.get(v.index()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn universe(&self) -> usize {
        self.excluded.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.excluded
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(i, _)| NodeId::new(i))
    }

    pub fn union(&self, other: &NodeMask) -> NodeMask {
        assert_eq!(
            self.universe(),
            other.universe(),
            "masks over different node sets"
        );
        let excluded: Vec<bool> = self
            .excluded
            .iter()
            .zip(&other.excluded)
            .map(|(a, b)| *a || *b)
            .collect();
        let count = excluded.iter().filter(|x| **x).count();
        NodeMask { excluded, count }
    }
}

/// `G(V \ mask, E)`: excluded nodes have no incident arcs and are skipped by
/// every iterator. The underlying graph is untouched.
#[derive(Clone, Debug)]
pub struct GraphView<'g> {
    graph: &'g Graph,
    mask: NodeMask,
}

pub fn masked_view<'g>(g: &'g Graph, mask: &NodeMask) -> Result<GraphView<'g>> {
    if mask.universe() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "mask covers {} nodes, graph has {}",
            mask.universe(),
            g.n()
        )));
    }
    Ok(GraphView {
        graph: g,
        mask: mask.clone(),
    })
}

impl<'g> GraphView<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn mask(&self) -> &NodeMask {
        &self.mask
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn is_live(&self, v: NodeId) -> bool {
        !self.mask.contains(v)
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.graph.nodes().filter(move |&v| self.is_live(v))
    }

    pub fn live_count(&self) -> usize {
        self.n() - self.mask.len()
    }

    pub fn out_arcs(&self, u: NodeId) -> impl Iterator<Item = (EdgeId, &'g Edge)> + '_ {
        let live = self.is_live(u);
        self.graph
            .out_arcs(u)
            .filter(move |(_, e)| live && self.is_live(e.dst))
    }

    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = (EdgeId, &'g Edge)> + '_ {
        let live = self.is_live(v);
        self.graph
            .in_arcs(v)
            .filter(move |(_, e)| live && self.is_live(e.src))
    }

    pub fn arc_count(&self) -> usize {
        self.live_nodes().map(|u| self.out_arcs(u).count()).sum()
    }

    /// Further masking; `view.masked(b)` equals masking `a ∪ b` at once.
    pub fn masked(&self, more: &NodeMask) -> GraphView<'g> {
        GraphView {
            graph: self.graph,
            mask: self.mask.union(more),
        }
    }
}
