//! Reference expectations computed without the cascade engine: every
//! possible world (live arcs, interaction outcomes, live-edge choices) is
//! enumerated explicitly and evaluated by plain breadth-first search.

#![allow(dead_code)]

use std::collections::VecDeque;

use osim_core::{EdgeWeight, Graph, NodeId};

/// Per-node expectations over all worlds.
#[derive(Clone, Debug)]
pub struct Expectation {
    pub activation: Vec<f64>,
    /// `E[o'_v · 1{active}]`.
    pub opinion: Vec<f64>,
    /// Same with negative opinions scaled by `λ`.
    pub effective: Vec<f64>,
    pub seeds: Vec<bool>,
}

impl Expectation {
    fn new(n: usize, seeds: &[NodeId]) -> Self {
        let mut is_seed = vec![false; n];
        for s in seeds {
            is_seed[s.index()] = true;
        }
        Expectation {
            activation: vec![0.0; n],
            opinion: vec![0.0; n],
            effective: vec![0.0; n],
            seeds: is_seed,
        }
    }

    fn non_seed_sum(&self, xs: &[f64]) -> f64 {
        xs.iter()
            .zip(&self.seeds)
            .filter(|(_, s)| !**s)
            .map(|(x, _)| x)
            .sum()
    }

    pub fn spread(&self) -> f64 {
        self.non_seed_sum(&self.activation)
    }

    pub fn opinion_spread(&self) -> f64 {
        self.non_seed_sum(&self.opinion)
    }

    pub fn effective_spread(&self) -> f64 {
        self.non_seed_sum(&self.effective)
    }
}

/// Calls `f(weight, outcome_index_per_variable)` for every joint outcome of
/// independent categorical variables.
fn for_each_world(vars: &[Vec<f64>], mut f: impl FnMut(f64, &[usize])) {
    let mut idx = vec![0usize; vars.len()];
    loop {
        let w: f64 = vars.iter().zip(&idx).map(|(v, &i)| v[i]).product();
        if w > 0.0 {
            f(w, &idx);
        }
        let mut pos = 0;
        loop {
            if pos == vars.len() {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < vars[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// BFS distances from `seeds` over arcs where `live[e]`.
fn distances(g: &Graph, seeds: &[NodeId], live: &[bool]) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    let mut q = VecDeque::new();
    for &s in seeds {
        if dist[s.index()].is_none() {
            dist[s.index()] = Some(0);
            q.push_back(s);
        }
    }
    while let Some(u) = q.pop_front() {
        let d = dist[u.index()].unwrap();
        for (e, arc) in g.out_arcs(u) {
            if live[e] && dist[arc.dst.index()].is_none() {
                dist[arc.dst.index()] = Some(d + 1);
                q.push_back(arc.dst);
            }
        }
    }
    dist
}

/// Final opinions in one world: a node at distance `d` averages the signed
/// final opinions of its live in-neighbours at distance `d - 1`.
fn world_opinions(g: &Graph, dist: &[Option<usize>], live: &[bool], agree: &[bool]) -> Vec<f64> {
    let mut order: Vec<NodeId> = g.nodes().filter(|v| dist[v.index()].is_some()).collect();
    order.sort_by_key(|v| dist[v.index()]);
    let mut o = vec![0.0; g.n()];
    for v in order {
        let d = dist[v.index()].unwrap();
        let own = g.opinion(v);
        if d == 0 {
            o[v.index()] = own;
            continue;
        }
        let contrib: Vec<f64> = g
            .in_arcs(v)
            .filter(|(e, a)| live[*e] && dist[a.src.index()] == Some(d - 1))
            .map(|(e, a)| {
                if agree[e] {
                    o[a.src.index()]
                } else {
                    -o[a.src.index()]
                }
            })
            .collect();
        o[v.index()] = (own + contrib.iter().sum::<f64>() / contrib.len() as f64) / 2.0;
    }
    o
}

fn accumulate(out: &mut Expectation, w: f64, dist: &[Option<usize>], o: &[f64], lambda: f64) {
    for v in 0..dist.len() {
        if dist[v].is_some() {
            out.activation[v] += w;
            out.opinion[v] += w * o[v];
            out.effective[v] += w * if o[v] > 0.0 { o[v] } else { lambda * o[v] };
        }
    }
}

/// IC-family worlds: each arc is live with its weight, and (when
/// `with_opinions`) agrees with probability `φ`.
pub fn ic_worlds(
    g: &Graph,
    seeds: &[NodeId],
    weight: EdgeWeight,
    with_opinions: bool,
    lambda: f64,
) -> Expectation {
    let m = g.m();
    let mut vars: Vec<Vec<f64>> = (0..m)
        .map(|e| {
            let p = g.weight(e, weight);
            vec![p, 1.0 - p]
        })
        .collect();
    if with_opinions {
        vars.extend(g.edges().iter().map(|a| vec![a.phi, 1.0 - a.phi]));
    }
    let mut out = Expectation::new(g.n(), seeds);
    for_each_world(&vars, |w, idx| {
        let live: Vec<bool> = idx[..m].iter().map(|&i| i == 0).collect();
        let agree: Vec<bool> = if with_opinions {
            idx[m..].iter().map(|&i| i == 0).collect()
        } else {
            vec![true; m]
        };
        let dist = distances(g, seeds, &live);
        let o = if with_opinions {
            world_opinions(g, &dist, &live, &agree)
        } else {
            g.nodes().map(|v| g.opinion(v)).collect()
        };
        accumulate(&mut out, w, &dist, &o, lambda);
    });
    out
}

/// Live-edge worlds: every node keeps at most one in-arc, arc `i` with
/// probability `w_i`, none with the residual.
pub fn live_edge_worlds(g: &Graph, seeds: &[NodeId], lambda: f64) -> Expectation {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let vars: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&v| {
            let mut ws: Vec<f64> = g.in_arcs(v).map(|(_, a)| a.w).collect();
            let residual = 1.0 - ws.iter().sum::<f64>();
            ws.push(residual.max(0.0));
            ws
        })
        .collect();
    let mut out = Expectation::new(g.n(), seeds);
    for_each_world(&vars, |w, idx| {
        let mut live = vec![false; g.m()];
        for (&v, &i) in nodes.iter().zip(idx) {
            if let Some(&e) = g.in_edge_ids(v).get(i) {
                live[e as usize] = true;
            }
        }
        let dist = distances(g, seeds, &live);
        let o: Vec<f64> = g.nodes().map(|v| g.opinion(v)).collect();
        accumulate(&mut out, w, &dist, &o, lambda);
    });
    out
}

/// Marginal of `b` on top of `a`, per world: the nodes `b` reaches once the
/// nodes `a` activated are removed, minus the new seeds. Shares arc coins
/// between both seed sets.
pub fn ic_discounted_marginal(g: &Graph, a: &[NodeId], b: &[NodeId]) -> f64 {
    let vars: Vec<Vec<f64>> = g.edges().iter().map(|e| vec![e.p, 1.0 - e.p]).collect();
    let mut total = 0.0;
    for_each_world(&vars, |w, idx| {
        let live: Vec<bool> = idx.iter().map(|&i| i == 0).collect();
        let da = distances(g, a, &live);
        let reached_a: Vec<bool> = da.iter().map(Option::is_some).collect();
        // B's cascade on G minus R(A).
        let pruned: Vec<bool> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, arc)| live[e] && !reached_a[arc.src.index()] && !reached_a[arc.dst.index()])
            .collect();
        let fresh: Vec<NodeId> = b
            .iter()
            .copied()
            .filter(|v| !reached_a[v.index()])
            .collect();
        let db = distances(g, &fresh, &pruned);
        let new_nodes = db.iter().filter(|d| d.is_some()).count() as f64;
        let new_seeds = b.iter().filter(|v| !a.contains(v)).count() as f64;
        total += w * (new_nodes - new_seeds);
    });
    total
}

/// Closed form of the expected opinion spread of `u₀` on the path
/// `u₀ → u₁ → … → u_l` with arc probabilities `p`, interactions `φ` and
/// opinions `o` (length `l + 1`), with `ψ_j = (2φ_j - 1) / 2`:
///
/// `Σ_{i=1..l} (Π_{j<i} p_j) (Σ_{j=1..i} (o_j/2) Π_{k=1..i-j} ψ_{i-k} + o_0 Π_{k=1..i} ψ_{i-k})`.
pub fn path_opinion_closed_form(p: &[f64], phi: &[f64], o: &[f64]) -> f64 {
    let l = p.len();
    let psi: Vec<f64> = phi.iter().map(|f| (2.0 * f - 1.0) / 2.0).collect();
    let psi_run = |i: usize, count: usize| -> f64 { (1..=count).map(|k| psi[i - k]).product() };
    let mut total = 0.0;
    for i in 1..=l {
        let reach: f64 = p[..i].iter().product();
        let mut inner = o[0] * psi_run(i, i);
        for (j, oj) in o.iter().enumerate().take(i + 1).skip(1) {
            inner += oj / 2.0 * psi_run(i, i - j);
        }
        total += reach * inner;
    }
    total
}
