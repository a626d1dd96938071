//! Depth-first traversal, graph encodings and their decoder, hike
//! enumeration and the counting bounds built on them.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;

/// An edge-defined subgraph, vertices labeled as in the ambient graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: BTreeSet<usize>,
    /// Canonical `(min, max)` pairs.
    pub edges: BTreeSet<(usize, usize)>,
}

impl Subgraph {
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(edges: I) -> Self {
        let mut h = Self::default();
        for (u, v) in edges {
            h.add_edge(u, v);
        }
        h
    }

    pub fn single_vertex(v: usize) -> Self {
        Self {
            vertices: BTreeSet::from([v]),
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert((u.min(v), u.max(v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut deg: BTreeMap<usize, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for &(u, v) in &self.edges {
            *deg.get_mut(&u).unwrap() += 1;
            *deg.get_mut(&v).unwrap() += 1;
        }
        deg
    }

    pub fn degree_one_count(&self) -> usize {
        self.degrees().values().filter(|&&d| d == 1).count()
    }

    /// Relabels to `0..|V|` in increasing vertex order; returns the local
    /// graph and the local-to-ambient map.
    pub fn to_graph(&self) -> (Graph, Vec<usize>) {
        let labels: Vec<usize> = self.vertices.iter().copied().collect();
        let local: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|(u, v)| (local[u], local[v])).collect();
        let mut adj = vec![Vec::new(); labels.len()];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        (Graph::from_adjacency(adj).expect("subgraph of a simple graph"), labels)
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.is_empty() || self.to_graph().0.is_connected()
    }

    pub fn check_in(&self, g: &Graph) -> Result<()> {
        if let Some(&v) = self.vertices.iter().find(|&&v| v >= g.n()) {
            return Err(Error::NotSubgraph(format!("vertex {v} out of range")));
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| g.edge_id(u, v).is_none()) {
            return Err(Error::NotSubgraph(format!("({u},{v}) is not an edge")));
        }
        Ok(())
    }

    /// Neighbors of `v` within the subgraph, in the ambient neighbor order.
    fn ordered_neighbors(&self, g: &Graph, v: usize) -> Vec<usize> {
        g.neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.has_edge(v, u))
            .collect()
    }
}

/// `|E(H)| − |V(H)|`.
pub fn excess(h: &Subgraph) -> i64 {
    h.num_edges() as i64 - h.num_vertices() as i64
}

/// Vertices of degree greater than two.
pub fn excess_set(h: &Subgraph) -> BTreeSet<usize> {
    h.degrees()
        .into_iter()
        .filter(|&(_, d)| d > 2)
        .map(|(v, _)| v)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfsTrace {
    /// Edges in the order of their recursive step.
    pub traversal: Vec<(usize, usize)>,
    pub sigma: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    Green,
    Yellow,
    Red,
}

struct DfsRun {
    trace: DfsTrace,
    /// Recursive steps per vertex in visitation order.
    recursive: Vec<usize>,
    /// `(from, to, excluded slot)` per recursive step.
    steps: Vec<(usize, usize, Option<usize>)>,
}

/// Three-color traversal in which every edge is traversed once by a
/// recursive step and once by a backtrack step. The final backtrack out of
/// the root is not recorded.
fn dfs_run(n: usize, root: usize, neighbors: impl Fn(usize) -> Vec<usize>) -> DfsRun {
    let mut color = vec![Color::Green; n];
    let mut trace = DfsTrace {
        traversal: Vec::new(),
        sigma: String::new(),
    };
    let mut position = BTreeMap::from([(root, 0usize)]);
    let mut recursive = vec![0];
    let mut steps = Vec::new();
    let mut root_first_child: Option<usize> = None;

    // frames: (vertex, parent, neighbor list, cursor)
    color[root] = Color::Yellow;
    let mut stack = vec![(root, None::<usize>, neighbors(root), 0usize)];
    while let Some(frame) = stack.last_mut() {
        let (v, parent) = (frame.0, frame.1);
        if frame.3 < frame.2.len() {
            let u = frame.2[frame.3];
            frame.3 += 1;
            if Some(u) == parent || color[u] == Color::Red {
                continue;
            }
            trace.sigma.push('R');
            trace.traversal.push((v, u));
            recursive[position[&v]] += 1;
            let excluded = if v == root { root_first_child } else { parent };
            steps.push((v, u, excluded));
            if v == root && root_first_child.is_none() {
                root_first_child = Some(u);
            }
            if color[u] == Color::Green {
                color[u] = Color::Yellow;
                position.insert(u, recursive.len());
                recursive.push(0);
                let nb = neighbors(u);
                stack.push((u, Some(v), nb, 0));
            } else {
                trace.sigma.push('B');
            }
        } else {
            color[v] = Color::Red;
            stack.pop();
            trace.sigma.push('B');
        }
    }
    trace.sigma.pop();
    DfsRun {
        trace,
        recursive,
        steps,
    }
}

/// Depth-first traversal of a connected graph from `v`.
pub fn dfs(g: &Graph, v: usize) -> Result<DfsTrace> {
    if v >= g.n() {
        return Err(Error::InvalidGraph(format!("start vertex {v} out of range")));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(dfs_run(g.n(), v, |x| g.neighbors(x).to_vec()).trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncodingMode {
    I,
    II,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphEncodingI {
    pub start: usize,
    /// 1-based neighbor indices, one per recursive step.
    pub degrees: Vec<usize>,
    pub sigma: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphEncodingII {
    pub start: usize,
    pub degrees: Vec<usize>,
    /// Recursive-neighbor count per vertex in visitation order.
    pub sigma: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphEncoding {
    I(GraphEncodingI),
    II(GraphEncodingII),
}

impl GraphEncoding {
    pub fn start(&self) -> usize {
        match self {
            Self::I(e) => e.start,
            Self::II(e) => e.start,
        }
    }

    pub fn degrees(&self) -> &[usize] {
        match self {
            Self::I(e) => &e.degrees,
            Self::II(e) => &e.degrees,
        }
    }
}

/// Candidate targets from `v`: the ambient neighbor list minus the excluded slot.
fn candidates(g: &Graph, v: usize, excluded: Option<usize>) -> Vec<usize> {
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&u| Some(u) != excluded)
        .collect()
}

/// Encodes a connected subgraph `h` of `g` from `start`.
///
/// Neighbor indices skip the parent slot; at the root the first step indexes
/// all `d` slots and later steps skip the first child, so the sequence lies in
/// `[d] × [d−1]^{m−1}`.
pub fn encode_graph(g: &Graph, h: &Subgraph, start: usize, mode: EncodingMode) -> Result<GraphEncoding> {
    h.check_in(g)?;
    if !h.vertices.contains(&start) {
        return Err(Error::NotSubgraph(format!(
            "start {start} is not a vertex of the subgraph"
        )));
    }
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let run = dfs_run(g.n(), start, |x| h.ordered_neighbors(g, x));
    let degrees = run
        .steps
        .iter()
        .map(|&(v, u, excluded)| candidates(g, v, excluded).iter().position(|&x| x == u).unwrap() + 1)
        .collect();
    Ok(match mode {
        EncodingMode::I => GraphEncoding::I(GraphEncodingI {
            start,
            degrees,
            sigma: run.trace.sigma,
        }),
        EncodingMode::II => GraphEncoding::II(GraphEncodingII {
            start,
            degrees,
            sigma: run.recursive,
        }),
    })
}

struct Decoder<'a> {
    g: &'a Graph,
    h: Subgraph,
    degrees: std::slice::Iter<'a, usize>,
    /// `(vertex, excluded slot)`
    stack: Vec<(usize, Option<usize>)>,
    root_first_child: Option<usize>,
}

impl<'a> Decoder<'a> {
    fn new(g: &'a Graph, start: usize, degrees: &'a [usize]) -> Result<Self> {
        if start >= g.n() {
            return Err(Error::Decode(format!("start vertex {start} out of range")));
        }
        Ok(Self {
            g,
            h: Subgraph::single_vertex(start),
            degrees: degrees.iter(),
            stack: vec![(start, None)],
            root_first_child: None,
        })
    }

    /// Performs a recursive step; returns whether the target was new.
    fn recurse(&mut self) -> Result<bool> {
        let (v, parent) = *self.stack.last().expect("stack is never empty");
        let is_root = self.stack.len() == 1;
        let excluded = if is_root { self.root_first_child } else { parent };
        let idx = *self
            .degrees
            .next()
            .ok_or_else(|| Error::Decode("degree sequence exhausted".into()))?;
        let cands = candidates(self.g, v, excluded);
        if idx == 0 || idx > cands.len() {
            return Err(Error::Decode(format!(
                "neighbor index {idx} out of range 1..={} at vertex {v}",
                cands.len()
            )));
        }
        let next = cands[idx - 1];
        let fresh = !self.h.vertices.contains(&next);
        if !self.h.add_edge(v, next) {
            return Err(Error::Decode(format!("edge ({v},{next}) traversed twice")));
        }
        if is_root && self.root_first_child.is_none() {
            self.root_first_child = Some(next);
        }
        if fresh {
            self.stack.push((next, Some(v)));
        }
        Ok(fresh)
    }

    fn backtrack(&mut self) -> Result<()> {
        if self.stack.len() <= 1 {
            return Err(Error::Decode("stack underflow".into()));
        }
        self.stack.pop();
        Ok(())
    }

    fn finish(mut self) -> Result<Subgraph> {
        if self.degrees.next().is_some() {
            return Err(Error::Decode("unused neighbor indices".into()));
        }
        Ok(self.h)
    }
}

/// Reconstructs the subgraph from its encoding.
pub fn decode_graph(enc: &GraphEncoding, g: &Graph) -> Result<Subgraph> {
    match enc {
        GraphEncoding::I(e) => {
            let mut dec = Decoder::new(g, e.start, &e.degrees)?;
            let mut sigma = e.sigma.chars();
            while let Some(step) = sigma.next() {
                match step {
                    'R' => {
                        if !dec.recurse()? {
                            match sigma.next() {
                                Some('B') => {}
                                Some(c) => {
                                    return Err(Error::Decode(format!(
                                        "expected B after a step to a visited vertex, found {c}"
                                    )))
                                }
                                None => return Err(Error::Decode("σ exhausted prematurely".into())),
                            }
                        }
                    }
                    'B' => dec.backtrack()?,
                    c => return Err(Error::Decode(format!("invalid step symbol {c:?}"))),
                }
            }
            if dec.stack.len() != 1 {
                return Err(Error::Decode("σ exhausted prematurely".into()));
            }
            dec.finish()
        }
        GraphEncoding::II(e) => {
            let mut dec = Decoder::new(g, e.start, &e.degrees)?;
            let mut counts = e.sigma.iter();
            let mut next_count = |v: usize, is_root: bool| -> Result<usize> {
                let c = *counts
                    .next()
                    .ok_or_else(|| Error::Decode("σ exhausted prematurely".into()))?;
                let cap = g.degree(v) - usize::from(!is_root);
                if c > cap {
                    return Err(Error::Decode(format!(
                        "{c} recursive neighbors at vertex {v} exceeds {cap}"
                    )));
                }
                Ok(c)
            };
            let mut ord = vec![next_count(e.start, true)?];
            let mut stack_ord = vec![0usize];
            loop {
                let top = *stack_ord.last().unwrap();
                if ord[top] > 0 {
                    ord[top] -= 1;
                    if dec.recurse()? {
                        let v = dec.stack.last().unwrap().0;
                        ord.push(next_count(v, false)?);
                        stack_ord.push(ord.len() - 1);
                    }
                } else if stack_ord.len() == 1 {
                    break;
                } else {
                    dec.backtrack()?;
                    stack_ord.pop();
                }
            }
            if counts.next().is_some() {
                return Err(Error::Decode("unused recursive-neighbor counts".into()));
            }
            dec.finish()
        }
    }
}

/// All connected subgraphs with between 1 and `max_edges` edges.
pub fn connected_subgraphs(g: &Graph, max_edges: usize, limit: usize) -> Result<Vec<Subgraph>> {
    let mut all: Vec<Vec<usize>> = Vec::new();
    let mut layer: HashSet<Vec<usize>> = (0..g.num_edges()).map(|e| vec![e]).collect();
    for size in 1..=max_edges {
        let mut sorted: Vec<Vec<usize>> = layer.iter().cloned().collect();
        sorted.sort();
        all.extend(sorted.iter().cloned());
        if all.len() > limit {
            return Err(Error::EnumerationGuard(format!(
                "more than {limit} connected subgraphs"
            )));
        }
        if size == max_edges {
            break;
        }
        let mut next = HashSet::new();
        for set in &sorted {
            let mut touched = BTreeSet::new();
            for &e in set {
                let (u, v) = g.edges()[e];
                touched.insert(u);
                touched.insert(v);
            }
            for &x in &touched {
                for j in 0..g.degree(x) {
                    let e = g.slot_edge(x, j);
                    if let Err(pos) = set.binary_search(&e) {
                        let mut grown = set.clone();
                        grown.insert(pos, e);
                        next.insert(grown);
                    }
                }
            }
        }
        layer = next;
    }
    Ok(all
        .into_iter()
        .map(|set| Subgraph::from_edges(set.into_iter().map(|e| g.edges()[e])))
        .collect())
}

/// A closed walk of `2k` steps, non-backtracking except possibly at step `k+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hike {
    pub vertices: Vec<usize>,
}

impl Hike {
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self> {
        let len = vertices.len();
        if len < 3 || len.is_multiple_of(2) {
            return Err(Error::Shape(format!("a hike has 2k+1 ≥ 3 vertices, got {len}")));
        }
        if vertices[0] != vertices[len - 1] {
            return Err(Error::Shape("hike is not closed".into()));
        }
        let k = (len - 1) / 2;
        for i in 0..len - 1 {
            if g.edge_id(vertices[i], vertices[i + 1]).is_none() {
                return Err(Error::Shape(format!("step {} is not an edge", i + 1)));
            }
            // step i+1 ends at vertices[i+1]; it backtracks if it returns to vertices[i-1]
            if i >= 1 && i + 1 != k + 1 && vertices[i + 1] == vertices[i - 1] {
                return Err(Error::Shape(format!("step {} backtracks", i + 1)));
            }
        }
        Ok(Self { vertices })
    }

    pub fn k(&self) -> usize {
        (self.vertices.len() - 1) / 2
    }

    /// Traversal count per undirected edge.
    pub fn edge_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut counts = BTreeMap::new();
        for w in self.vertices.windows(2) {
            *counts.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0) += 1;
        }
        counts
    }

    pub fn is_singleton_free(&self) -> bool {
        self.edge_counts().values().all(|&c| c >= 2)
    }
}

/// Union of the vertices and edges a hike traverses.
pub fn hike_graph(w: &Hike) -> Subgraph {
    let mut h = Subgraph::single_vertex(w.vertices[0]);
    for pair in w.vertices.windows(2) {
        h.add_edge(pair[0], pair[1]);
    }
    h
}

pub const HIKE_GUARD: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HikeEnumeration {
    pub count: u64,
    pub hikes: Option<Vec<Hike>>,
}

/// Counts (and optionally lists) all `k`-hikes, parallel over start vertices.
pub fn enumerate_hikes(g: &Graph, k: usize, singleton_free_only: bool, collect: bool) -> Result<HikeEnumeration> {
    if k == 0 {
        return Err(Error::Shape("k must be positive".into()));
    }
    let d = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    let work = (g.n() * d) as f64 * ((d.max(1) - 1) as f64).powi(2 * k as i32);
    if work > HIKE_GUARD {
        return Err(Error::EnumerationGuard(format!(
            "(d−1)^(2k)·n·d = {work:.3e} exceeds {HIKE_GUARD:.0e}"
        )));
    }
    let per_start: Vec<(u64, Vec<Hike>)> = (0..g.n())
        .into_par_iter()
        .map(|s| {
            let mut st = HikeWalker {
                g,
                k,
                singleton_free_only,
                collect,
                path: vec![s],
                counts: vec![0u32; g.num_edges()],
                singles: 0,
                found: 0,
                hikes: Vec::new(),
            };
            st.extend();
            (st.found, st.hikes)
        })
        .collect();
    let count = per_start.iter().map(|p| p.0).sum();
    let hikes = collect.then(|| per_start.into_iter().flat_map(|p| p.1).collect());
    Ok(HikeEnumeration { count, hikes })
}

struct HikeWalker<'a> {
    g: &'a Graph,
    k: usize,
    singleton_free_only: bool,
    collect: bool,
    path: Vec<usize>,
    counts: Vec<u32>,
    /// Edges traversed exactly once so far.
    singles: usize,
    found: u64,
    hikes: Vec<Hike>,
}

impl HikeWalker<'_> {
    fn extend(&mut self) {
        let steps = self.path.len() - 1;
        let total = 2 * self.k;
        if steps == total {
            if self.path[0] == self.path[steps] && (!self.singleton_free_only || self.singles == 0) {
                self.found += 1;
                if self.collect {
                    self.hikes.push(Hike {
                        vertices: self.path.clone(),
                    });
                }
            }
            return;
        }
        if self.singleton_free_only && self.singles > total - steps {
            return;
        }
        let v = self.path[steps];
        let step = steps + 1;
        let prev = (steps >= 1).then(|| self.path[steps - 1]);
        for j in 0..self.g.degree(v) {
            let u = self.g.neighbors(v)[j];
            if step != self.k + 1 && Some(u) == prev {
                continue;
            }
            let e = self.g.slot_edge(v, j);
            self.counts[e] += 1;
            match self.counts[e] {
                1 => self.singles += 1,
                2 => self.singles -= 1,
                _ => {}
            }
            self.path.push(u);
            self.extend();
            self.path.pop();
            match self.counts[e] {
                1 => self.singles -= 1,
                2 => self.singles += 1,
                _ => {}
            }
            self.counts[e] -= 1;
        }
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountBounds {
    pub gamma1: f64,
    pub bound1: f64,
    pub log2_bound1: f64,
    pub gamma2: Option<f64>,
    pub bound2: Option<f64>,
    /// Why the second bound was not evaluated.
    pub regime: Option<String>,
    /// `r` was raised to 1 before evaluation.
    pub r_floored: bool,
}

/// `γ₁ = 1 + log(nrk)/2k + log(rk)/r`.
pub fn gamma1(n: usize, k: usize, r: usize) -> f64 {
    let (n, k, r) = (n as f64, k as f64, r as f64);
    1.0 + (n * r * k).log2() / (2.0 * k) + (r * k).log2() / r
}

/// `γ₂ = log(16nk³rd)/2k + log(rk)/r + H₂(5δ)/2 + δ·log d`, valid for `3 ≤ k ≤ e^{δr}`.
pub fn gamma2(n: usize, d: usize, k: usize, r: usize, delta: f64) -> Result<f64> {
    if k < 3 || (k as f64) > (delta * r as f64).exp() {
        return Err(Error::Regime(format!(
            "need 3 ≤ k ≤ e^(δr) = {:.4}, got k = {k}",
            (delta * r as f64).exp()
        )));
    }
    if !(0.0..=0.2).contains(&delta) {
        return Err(Error::Regime(format!("need 0 ≤ 5δ ≤ 1, got δ = {delta}")));
    }
    let (nf, df, kf, rf) = (n as f64, d as f64, k as f64, r as f64);
    Ok((16.0 * nf * kf.powi(3) * rf * df).log2() / (2.0 * kf)
        + (rf * kf).log2() / rf
        + binary_entropy(5.0 * delta) / 2.0
        + delta * df.log2())
}

fn hike_bound(gamma: f64, d: usize, k: usize) -> f64 {
    (2f64.powf(gamma) * ((d - 1) as f64).sqrt()).powi(2 * k as i32)
}

/// Upper bounds on the number of singleton-free `(k−1)`-hikes of an
/// `n`-vertex `d`-regular graph with bicycle-free radius `r`.
pub fn count_bounds(n: usize, d: usize, k: usize, r: usize, delta: f64) -> Result<CountBounds> {
    if d < 3 {
        return Err(Error::Regime(format!("need d ≥ 3, got {d}")));
    }
    if k == 0 || n == 0 {
        return Err(Error::Regime("need n, k ≥ 1".into()));
    }
    let r_floored = r == 0;
    let r = r.max(1);
    let g1 = gamma1(n, k, r);
    let log2_bound1 = 2.0 * k as f64 * (g1 + 0.5 * ((d - 1) as f64).log2());
    let (gamma2, bound2, regime) = match gamma2(n, d, k, r, delta) {
        Ok(g2) => (Some(g2), Some(hike_bound(g2, d, k)), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(CountBounds {
        gamma1: g1,
        bound1: hike_bound(g1, d, k),
        log2_bound1,
        gamma2,
        bound2,
        regime,
        r_floored,
    })
}

/// Second bound only; errors outside its regime.
pub fn count_bound2(n: usize, d: usize, k: usize, r: usize, delta: f64) -> Result<(f64, f64)> {
    let g2 = gamma2(n, d, k, r.max(1), delta)?;
    Ok((g2, hike_bound(g2, d, k)))
}

/// Bounds on the number of connected subgraphs with at most `k` edges:
/// `2nd(d−1)^{k−1}4^k`, and for subgraphs with at most two degree-one
/// vertices and excess at most `δk`, `2nk³d(d−1)^{k−1}2^{H₂(δ/(1−δ))k}d^{δk}`.
pub fn subgraph_count_bounds(n: usize, d: usize, k: usize, delta: f64) -> (f64, f64) {
    let (nf, df, kf) = (n as f64, d as f64, k as f64);
    let common = nf * df * (df - 1.0).powi(k as i32 - 1);
    let first = 2.0 * common * 4f64.powi(k as i32);
    let second =
        2.0 * kf.powi(3) * common * 2f64.powf(binary_entropy(delta / (1.0 - delta)) * kf) * df.powf(delta * kf);
    (first, second)
}

/// Segment endpoints and signed cycle windings of a hike on its hike graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HikeEncoding {
    pub r: usize,
    pub endpoints: Vec<usize>,
    pub cycle_counts: Vec<i64>,
}

/// `(r·|V(H)|)^{⌈2k/r⌉}`.
pub fn hike_encoding_count(r: usize, vertices: usize, k: usize) -> f64 {
    let r = r.max(1);
    ((r * vertices) as f64).powi((2 * k).div_ceil(r) as i32)
}

/// Splits the hike into stretches of `r` steps. Each stretch records its
/// start and how many more times it winds around the unique cycle of the
/// start's radius-`r` ball than the breadth-first path between its ends.
/// Winding is measured on the cycle edge from the lowest cycle vertex to its
/// lowest cycle neighbor.
pub fn encode_hike(h: &Subgraph, w: &Hike, r: usize) -> Result<HikeEncoding> {
    if r == 0 {
        return Err(Error::Regime("stretch length r must be positive".into()));
    }
    let (local, labels) = h.to_graph();
    if !local.bicycle_free_radius().admits(r) {
        return Err(Error::Regime(format!("hike graph is not bicycle-free at radius {r}")));
    }
    let index: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let walk: Vec<usize> = w
        .vertices
        .iter()
        .map(|v| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| Error::NotSubgraph(format!("hike vertex {v} outside the hike graph")))
        })
        .collect::<Result<_>>()?;
    let steps = walk.len() - 1;
    let mut endpoints = Vec::new();
    let mut cycle_counts = Vec::new();
    let mut start = 0;
    while start < steps {
        let end = (start + r).min(steps);
        let seg = &walk[start..=end];
        endpoints.push(labels[seg[0]]);
        cycle_counts.push(segment_winding(&local, &labels, seg, r));
        start = end;
    }
    Ok(HikeEncoding {
        r,
        endpoints,
        cycle_counts,
    })
}

fn segment_winding(g: &Graph, labels: &[usize], seg: &[usize], r: usize) -> i64 {
    let a = seg[0];
    let b = *seg.last().unwrap();
    let mut dist = vec![usize::MAX; g.n()];
    let mut parent = vec![usize::MAX; g.n()];
    dist[a] = 0;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if dist[x] == r {
            continue;
        }
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let Some((x, y)) = ball_cycle_edge(g, labels, &dist) else {
        return 0;
    };
    let crossings = |path: &[usize]| -> i64 {
        path.windows(2)
            .map(|p| match (p[0], p[1]) {
                (s, t) if s == x && t == y => 1,
                (s, t) if s == y && t == x => -1,
                _ => 0,
            })
            .sum()
    };
    let mut tree_path = vec![b];
    while *tree_path.last().unwrap() != a {
        tree_path.push(parent[*tree_path.last().unwrap()]);
    }
    tree_path.reverse();
    crossings(seg) - crossings(&tree_path)
}

/// The designated edge of the unique cycle in the ball, if there is one.
fn ball_cycle_edge(g: &Graph, labels: &[usize], dist: &[usize]) -> Option<(usize, usize)> {
    let inside = |v: usize| dist[v] != usize::MAX;
    let mut deg: Vec<usize> = (0..g.n())
        .map(|v| {
            if inside(v) {
                g.neighbors(v).iter().filter(|&&u| inside(u)).count()
            } else {
                0
            }
        })
        .collect();
    let mut alive: Vec<bool> = (0..g.n()).map(inside).collect();
    let mut leaves: Vec<usize> = (0..g.n()).filter(|&v| alive[v] && deg[v] <= 1).collect();
    while let Some(v) = leaves.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    leaves.push(u);
                }
            }
        }
    }
    let x = (0..g.n()).filter(|&v| alive[v]).min_by_key(|&v| labels[v])?;
    let y = g
        .neighbors(x)
        .iter()
        .copied()
        .filter(|&u| alive[u])
        .min_by_key(|&u| labels[u])?;
    Some((x, y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MopReport {
    pub exc: i64,
    pub vertices: usize,
    pub r: usize,
    pub bound: f64,
    /// Bicycle-free at radius `r` and `r ≥ 10·ln|V|`.
    pub hypothesis_holds: bool,
    pub pass: bool,
}

/// Checks `exc(H) ≤ ln(e|V|)/r · |V|`. A violated hypothesis is reported, not raised.
pub fn mop_excess_check(h: &Subgraph, r: usize) -> MopReport {
    let nv = h.num_vertices();
    let exc = excess(h);
    let nvf = nv as f64;
    let bound = if r == 0 {
        f64::INFINITY
    } else {
        (std::f64::consts::E * nvf).ln() / r as f64 * nvf
    };
    let bicycle_free = nv == 0 || h.to_graph().0.bicycle_free_radius().admits(r);
    MopReport {
        exc,
        vertices: nv,
        r,
        bound,
        hypothesis_holds: bicycle_free && r as f64 >= 10.0 * nvf.max(1.0).ln(),
        pass: exc as f64 <= bound,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSetReport {
    pub exc_set: usize,
    pub bound: f64,
    pub pass: bool,
}

/// Checks `|excSet(H)| ≤ 2δ|V(H)| + 2`.
pub fn excess_set_check(h: &Subgraph, delta: f64) -> ExcessSetReport {
    let exc_set = excess_set(h).len();
    let bound = 2.0 * delta * h.num_vertices() as f64 + 2.0;
    ExcessSetReport {
        exc_set,
        bound,
        pass: exc_set as f64 <= bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{random_regular, RegularGraph};

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dfs_examples() {
        let edge = path(2);
        let t = dfs(&edge, 0).unwrap();
        assert_eq!(t.sigma, "RB");
        assert_eq!(t.traversal, vec![(0, 1)]);

        let tri = RegularGraph::cycle(3);
        let t = dfs(&tri, 0).unwrap();
        assert_eq!(t.sigma, "RRRBBB");
        assert_eq!(t.traversal, vec![(0, 2), (2, 1), (1, 0)]);
        // neighbor order (1, 2) at vertex 0
        let tri = Graph::from_adjacency(vec![vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap();
        let t = dfs(&tri, 0).unwrap();
        assert_eq!(t.sigma, "RRRBBB");
        assert_eq!(t.traversal, vec![(0, 1), (1, 2), (2, 0)]);

        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(dfs(&star, 0).unwrap().sigma, "RBRBRB");

        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(dfs(&two, 0), Err(Error::Disconnected)));
    }

    #[test]
    fn dfs_visits_every_edge_once() {
        for g in [
            RegularGraph::petersen(),
            RegularGraph::complete(5),
            random_regular(16, 3, 2).unwrap(),
        ] {
            for v in 0..g.n() {
                let t = dfs(&g, v).unwrap();
                let m = g.num_edges();
                assert_eq!(t.traversal.len(), m);
                let set: BTreeSet<(usize, usize)> = t.traversal.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                assert_eq!(set.len(), m);
                assert_eq!(t.sigma.len(), 2 * m);
                assert_eq!(t.sigma.matches('R').count(), m);
            }
        }
    }

    #[test]
    fn encoding_examples() {
        let k4 = RegularGraph::complete(4);
        let h = Subgraph::from_edges([(0, 1)]);
        let GraphEncoding::I(e) = encode_graph(&k4, &h, 0, EncodingMode::I).unwrap() else {
            panic!()
        };
        assert_eq!(e.degrees.len(), 1);
        assert_eq!(e.sigma, "RB");

        let tri = Subgraph::from_edges([(0, 1), (1, 2), (0, 2)]);
        let enc = encode_graph(&k4, &tri, 0, EncodingMode::II).unwrap();
        let GraphEncoding::II(e2) = &enc else { panic!() };
        assert_eq!(e2.sigma, vec![1, 1, 1]);
        assert_eq!(decode_graph(&enc, &k4).unwrap(), tri);

        let c5 = RegularGraph::cycle(5);
        let tree = Subgraph::from_edges([(0, 1), (1, 2), (2, 3), (3, 4)]);
        for mode in [EncodingMode::I, EncodingMode::II] {
            for s in 0..5 {
                let enc = encode_graph(&c5, &tree, s, mode).unwrap();
                assert_eq!(decode_graph(&enc, &c5).unwrap(), tree);
            }
        }
        let outside = Subgraph::from_edges([(0, 2)]);
        assert!(matches!(
            encode_graph(&c5, &outside, 0, EncodingMode::I),
            Err(Error::NotSubgraph(_))
        ));
    }

    #[test]
    fn degree_sequences_fit_the_format() {
        let g = RegularGraph::petersen();
        for h in connected_subgraphs(&g, 5, 100_000).unwrap() {
            let start = *h.vertices.iter().next().unwrap();
            let enc = encode_graph(&g, &h, start, EncodingMode::I).unwrap();
            let degs = enc.degrees();
            assert!(degs[0] >= 1 && degs[0] <= 3);
            assert!(degs[1..].iter().all(|&x| (1..=2).contains(&x)));
        }
    }

    #[test]
    fn malformed_encodings() {
        let k4 = RegularGraph::complete(4);
        let bb = GraphEncoding::I(GraphEncodingI {
            start: 0,
            degrees: vec![],
            sigma: "BB".into(),
        });
        assert!(matches!(decode_graph(&bb, &k4), Err(Error::Decode(m)) if m.contains("underflow")));
        let out_of_range = GraphEncoding::I(GraphEncodingI {
            start: 0,
            degrees: vec![1, 3],
            sigma: "RRBB".into(),
        });
        assert!(matches!(decode_graph(&out_of_range, &k4), Err(Error::Decode(m)) if m.contains("out of range")));
        let short = GraphEncoding::I(GraphEncodingI {
            start: 0,
            degrees: vec![1, 1],
            sigma: "RR".into(),
        });
        assert!(decode_graph(&short, &k4).is_err());
        let mode2 = GraphEncoding::II(GraphEncodingII {
            start: 0,
            degrees: vec![1],
            sigma: vec![1],
        });
        assert!(decode_graph(&mode2, &k4).is_err());
    }

    #[test]
    fn small_hike_counts() {
        let k4 = RegularGraph::complete(4);
        assert_eq!(enumerate_hikes(&k4, 1, true, false).unwrap().count, 12);
        let c3 = RegularGraph::cycle(3);
        assert_eq!(enumerate_hikes(&c3, 2, true, false).unwrap().count, 6);
        assert_eq!(enumerate_hikes(&c3, 1, true, false).unwrap().count, 6);
        let big = random_regular(100, 4, 0).unwrap();
        assert!(matches!(
            enumerate_hikes(&big, 6, true, false),
            Err(Error::EnumerationGuard(_))
        ));
    }

    #[test]
    fn enumeration_matches_naive_walks() {
        let g = RegularGraph::petersen();
        for k in 1..=3 {
            let fast = enumerate_hikes(&g, k, false, true).unwrap();
            let mut naive = Vec::new();
            let mut stack: Vec<Vec<usize>> = (0..g.n()).map(|v| vec![v]).collect();
            while let Some(p) = stack.pop() {
                if p.len() == 2 * k + 1 {
                    if let Ok(h) = Hike::new(&g, p) {
                        naive.push(h);
                    }
                    continue;
                }
                for &u in g.neighbors(*p.last().unwrap()) {
                    let mut q = p.clone();
                    q.push(u);
                    stack.push(q);
                }
            }
            assert_eq!(fast.count as usize, naive.len());
            let sf = enumerate_hikes(&g, k, true, false).unwrap().count as usize;
            assert_eq!(sf, naive.iter().filter(|h| h.is_singleton_free()).count());
        }
    }

    #[test]
    fn excess_examples() {
        let star = Subgraph::from_edges([(0, 1), (0, 2), (0, 3)]);
        assert_eq!(excess(&star), -1);
        assert_eq!(excess_set(&star), BTreeSet::from([0]));
        let c5 = Subgraph::from_edges((0..5).map(|i| (i, (i + 1) % 5)));
        assert_eq!(excess(&c5), 0);
        assert!(excess_set(&c5).is_empty());
        let k4 = Subgraph::from_edges(RegularGraph::complete(4).edges().iter().copied());
        assert_eq!(excess(&k4), 2);
        assert_eq!(excess_set(&k4).len(), 4);
    }

    #[test]
    fn hike_graph_examples() {
        let c3 = RegularGraph::cycle(3);
        let out_and_back = Hike::new(&c3, vec![0, 1, 0]).unwrap();
        assert_eq!(hike_graph(&out_and_back), Subgraph::from_edges([(0, 1)]));
        let twice = Hike::new(&c3, vec![0, 1, 2, 0, 1, 2, 0]).unwrap();
        assert_eq!(twice.k(), 3);
        assert_eq!(hike_graph(&twice).num_edges(), 3);
        let p3 = Hike::new(&c3, vec![0, 1, 2, 1, 0]).unwrap();
        let h = hike_graph(&p3);
        assert_eq!(h.num_edges(), 2);
        assert_eq!(h.degree_one_count(), 2);
        assert!(Hike::new(&c3, vec![0, 1, 0, 1, 0]).is_err());
    }

    #[test]
    fn singleton_free_hike_graph_properties() {
        for g in [RegularGraph::complete(4), RegularGraph::petersen()] {
            for k in 1..=4 {
                let all = enumerate_hikes(&g, k, true, true).unwrap().hikes.unwrap();
                for w in all {
                    let h = hike_graph(&w);
                    assert!(h.degree_one_count() <= 2);
                    assert!(h.num_edges() <= k);
                }
            }
        }
    }

    #[test]
    fn bound_formulas() {
        let direct = 1.0 + (10.0f64 * 2.0 * 4.0).log2() / 8.0 + (2.0f64 * 4.0).log2() / 2.0;
        assert!((gamma1(10, 4, 2) - direct).abs() < 1e-12);
        assert_eq!(gamma1(10, 4, 2), gamma1(10, 4, 2));
        assert!(matches!(count_bound2(100, 3, 100, 10, 0.1), Err(Error::Regime(_))));
        let b = count_bounds(100, 3, 100, 10, 0.1).unwrap();
        assert!(b.bound2.is_none() && b.regime.is_some());
        let b = count_bounds(4, 3, 3, 0, 0.1).unwrap();
        assert!(b.r_floored);
    }

    #[test]
    fn brute_force_counts_respect_bounds() {
        let k4 = RegularGraph::complete(4);
        let b = count_bounds(4, 3, 3, 0, 0.1).unwrap();
        let count3 = enumerate_hikes(&k4, 3, true, false).unwrap().count as f64;
        let count2 = enumerate_hikes(&k4, 2, true, false).unwrap().count as f64;
        assert!(count3 <= b.bound1 && count2 <= b.bound1);

        let p = RegularGraph::petersen();
        let r = p.bicycle_free_radius().radius;
        for k in 2..=5 {
            let b = count_bounds(10, 3, k, r, 0.2).unwrap();
            let c = enumerate_hikes(&p, k - 1, true, false).unwrap().count as f64;
            assert!(c <= b.bound1);
            if let Some(b2) = b.bound2 {
                assert!(c <= b2);
            }
        }
    }

    #[test]
    fn subgraph_counts_respect_bounds() {
        for g in [RegularGraph::complete(4), RegularGraph::petersen()] {
            let (n, d) = (g.n(), g.d());
            let subs = connected_subgraphs(&g, 6, 1_000_000).unwrap();
            for k in 1..=6 {
                let (b1, b2) = subgraph_count_bounds(n, d, k, 0.25);
                let within: Vec<&Subgraph> = subs.iter().filter(|h| h.num_edges() <= k).collect();
                assert!(within.len() as f64 <= b1);
                let constrained = within
                    .iter()
                    .filter(|h| h.degree_one_count() <= 2 && excess(h) as f64 <= 0.25 * k as f64)
                    .count();
                assert!(constrained as f64 <= b2);
            }
        }
    }

    #[test]
    fn hike_encodings() {
        let p = RegularGraph::petersen();
        let hikes = enumerate_hikes(&p, 5, true, true).unwrap().hikes.unwrap();
        let mut by_graph: BTreeMap<Subgraph, usize> = BTreeMap::new();
        for w in &hikes {
            let h = hike_graph(w);
            let r = h.to_graph().0.bicycle_free_radius().radius.max(1);
            let enc = encode_hike(&h, w, r).unwrap();
            assert_eq!(enc.endpoints.len(), (2 * w.k()).div_ceil(r));
            assert!(enc.cycle_counts.iter().all(|&c| c.unsigned_abs() as usize <= r / 2));
            *by_graph.entry(h).or_default() += 1;
        }
        for (h, count) in by_graph {
            let r = h.to_graph().0.bicycle_free_radius().radius.max(1);
            assert!(count as f64 <= hike_encoding_count(r, h.num_vertices(), 5));
        }
        let c3 = RegularGraph::cycle(3);
        let w = Hike::new(&c3, vec![0, 1, 2, 0, 1, 2, 0]).unwrap();
        let enc = encode_hike(&hike_graph(&w), &w, 6).unwrap();
        assert_eq!(enc.endpoints, vec![0]);
        assert_eq!(enc.cycle_counts[0].abs(), 2);
    }

    #[test]
    fn mop_examples() {
        let c100 = Subgraph::from_edges((0..100).map(|i| (i, (i + 1) % 100)));
        let r = mop_excess_check(&c100, 50);
        assert!(r.hypothesis_holds && r.pass && r.exc == 0);
        let tree = Subgraph::from_edges([(0, 1), (1, 2), (1, 3)]);
        let r = mop_excess_check(&tree, 14);
        assert!(r.hypothesis_holds && r.pass && r.exc == -1);
        let k4 = Subgraph::from_edges(RegularGraph::complete(4).edges().iter().copied());
        assert!(!mop_excess_check(&k4, 20).hypothesis_holds);
        assert!(excess_set_check(&tree, 0.1).pass);
    }

    #[test]
    fn mop_on_hike_graphs_of_a_girth_six_graph() {
        // Heawood graph: 3-regular, girth 6
        let edges: Vec<(usize, usize)> = (0..14)
            .map(|i| (i, (i + 1) % 14))
            .chain((0..14).step_by(2).map(|i| (i, (i + 5) % 14)))
            .collect();
        let g = RegularGraph::from_edges(14, &edges).unwrap();
        assert_eq!(g.girth(), Some(6));
        let hikes = enumerate_hikes(&g, 4, true, true).unwrap().hikes.unwrap();
        assert!(!hikes.is_empty());
        for w in hikes {
            let h = hike_graph(&w);
            let r = h.to_graph().0.bicycle_free_radius();
            let rep = mop_excess_check(&h, r.radius.max(1));
            assert!(rep.pass);
        }
    }
}
