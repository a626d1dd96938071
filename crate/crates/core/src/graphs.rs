//! Simple graphs with ordered adjacency, regular graphs, signings, abelian
//! lifts, and the signed adjacency / non-backtracking operators.

use std::collections::{HashSet, VecDeque};
use std::ops::Deref;

use faer::Mat;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{AbelianGroupSpec, CharacterIndex, GroupDescriptor, GroupElement};

/// Largest dense non-backtracking operator we are willing to build.
pub const MAX_NB_DIM: usize = 4096;

/// A simple undirected graph with a fixed neighbor order at every vertex.
///
/// Edges are stored with canonical orientation `u < v`; an edge id is the
/// position in [`Graph::edges`]. Directed edge `2e` is `(u, v)`, `2e + 1` is
/// `(v, u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    slot_edge: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from ordered neighbor lists (0-based). The edge list is
    /// sorted lexicographically.
    pub fn from_adjacency(adj: Vec<Vec<usize>>) -> Result<Self> {
        let mut edges = Vec::new();
        for (u, nbrs) in adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_unstable();
        Self::with_edge_order(adj, edges)
    }

    /// Builds a graph from an edge list; neighbor order is the order of appearance.
    pub fn from_edges(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edge_list {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Self::from_adjacency(adj)
    }

    pub(crate) fn with_edge_order(adj: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = adj.len();
        for (u, nbrs) in adj.iter().enumerate() {
            let mut seen = HashSet::with_capacity(nbrs.len());
            for &v in nbrs {
                if v >= n {
                    return Err(Error::InvalidGraph(format!("neighbor {v} of {u} out of range")));
                }
                if v == u {
                    return Err(Error::InvalidGraph(format!("self-loop at {u}")));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidGraph(format!("multi-edge between {u} and {v}")));
                }
                if !adj[v].contains(&u) {
                    return Err(Error::InvalidGraph(format!(
                        "{v} is a neighbor of {u} but not vice versa"
                    )));
                }
            }
        }
        let mut slot_edge: Vec<Vec<usize>> = adj.iter().map(|l| vec![usize::MAX; l.len()]).collect();
        for (e, &(u, v)) in edges.iter().enumerate() {
            debug_assert!(u < v);
            let su = adj[u]
                .iter()
                .position(|&x| x == v)
                .ok_or_else(|| Error::InvalidGraph(format!("edge ({u},{v}) missing from adjacency")))?;
            let sv = adj[v].iter().position(|&x| x == u).unwrap();
            slot_edge[u][su] = e;
            slot_edge[v][sv] = e;
        }
        if slot_edge.iter().flatten().any(|&e| e == usize::MAX) {
            return Err(Error::InvalidGraph("edge list does not cover adjacency".into()));
        }
        Ok(Self { adj, edges, slot_edge })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Edge id incident to `v` at neighbor slot `j`.
    pub fn slot_edge(&self, v: usize, j: usize) -> usize {
        self.slot_edge[v][j]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let j = self.adj.get(u)?.iter().position(|&x| x == v)?;
        Some(self.slot_edge[u][j])
    }

    /// Index of the directed edge `(u, v)`.
    pub fn directed_index(&self, u: usize, v: usize) -> Option<usize> {
        let e = self.edge_id(u, v)?;
        Some(2 * e + usize::from(u > v))
    }

    pub fn directed_edge(&self, index: usize) -> (usize, usize) {
        let (u, v) = self.edges[index / 2];
        if index.is_multiple_of(2) {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, |l| l.len());
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Breadth-first distances from `s`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n()];
        let mut count = 0;
        for s in 0..self.n() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.components().1 == 1
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in 0..self.n() {
            let mut dist = vec![usize::MAX; self.n()];
            let mut parent = vec![usize::MAX; self.n()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[x] + 1 >= b {
                        break;
                    }
                }
                for &y in &self.adj[x] {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent[y] = x;
                        queue.push_back(y);
                    } else if parent[x] != y {
                        let len = dist[x] + dist[y] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Largest `r` such that every radius-`r` ball (induced on vertices within
    /// distance `r`) has `|E| − |V| ≤ 0`.
    pub fn bicycle_free_radius(&self) -> BicycleFreeRadius {
        let mut radius = usize::MAX;
        let mut max_ecc = 0;
        for s in 0..self.n() {
            let dist = self.bfs_distances(s);
            let ecc = dist.iter().filter(|&&x| x != usize::MAX).max().copied().unwrap_or(0);
            max_ecc = max_ecc.max(ecc);
            // vertices and induced edges entering the ball at each radius
            let mut new_v = vec![0i64; ecc + 1];
            let mut new_e = vec![0i64; ecc + 1];
            for &x in &dist {
                if x != usize::MAX {
                    new_v[x] += 1;
                }
            }
            for &(a, b) in &self.edges {
                let (da, db) = (dist[a], dist[b]);
                if da != usize::MAX {
                    new_e[da.max(db)] += 1;
                }
            }
            let mut exc = 0i64;
            for r in 0..=ecc {
                exc += new_e[r] - new_v[r];
                if exc > 0 {
                    radius = radius.min(r - 1);
                    break;
                }
            }
        }
        if radius == usize::MAX {
            BicycleFreeRadius {
                radius: max_ecc,
                capped: true,
            }
        } else {
            BicycleFreeRadius { radius, capped: false }
        }
    }

    /// Real 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.n(), self.n());
        for &(u, v) in &self.edges {
            m[(u, v)] = 1.0;
            m[(v, u)] = 1.0;
        }
        m
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n(),
            d: self.is_regular().unwrap_or(0),
            adj: self.adj.iter().map(|l| l.iter().map(|&v| v + 1).collect()).collect(),
        }
    }
}

/// Result of [`Graph::bicycle_free_radius`]. When `capped` is set every ball,
/// including whole components, has excess `≤ 0` and `radius` is the largest
/// eccentricity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicycleFreeRadius {
    pub radius: usize,
    pub capped: bool,
}

impl BicycleFreeRadius {
    /// Whether balls of radius `r` are all bicycle-free.
    pub fn admits(&self, r: usize) -> bool {
        self.capped || r <= self.radius
    }
}

/// `{"n":…, "d":…, "adj":[[…],…]}` with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub d: usize,
    pub adj: Vec<Vec<usize>>,
}

/// A `d`-regular simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    graph: Graph,
    d: usize,
}

impl Deref for RegularGraph {
    type Target = Graph;
    fn deref(&self) -> &Graph {
        &self.graph
    }
}

impl RegularGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        let d = graph
            .is_regular()
            .ok_or_else(|| Error::InvalidGraph("graph is not regular".into()))?;
        Ok(Self { graph, d })
    }

    pub fn from_adjacency(adj: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(Graph::from_adjacency(adj)?)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(Graph::from_edges(n, edges)?)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        if json.adj.len() != json.n {
            return Err(Error::InvalidGraph(format!(
                "n = {} but {} adjacency lists",
                json.n,
                json.adj.len()
            )));
        }
        let adj = json
            .adj
            .iter()
            .map(|l| {
                l.iter()
                    .map(|&v| {
                        v.checked_sub(1)
                            .ok_or_else(|| Error::InvalidGraph("vertices are 1-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let g = Self::from_adjacency(adj)?;
        if g.n() > 0 && g.d != json.d {
            return Err(Error::InvalidGraph(format!(
                "declared degree {} but graph is {}-regular",
                json.d, g.d
            )));
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect();
        Self::from_adjacency(adj).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        let adj = (0..n).map(|u| vec![(u + n - 1) % n, (u + 1) % n]).collect();
        Self::from_adjacency(adj).expect("cycle on >= 3 vertices is simple")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Self::from_edges(10, &edges).expect("Petersen graph is simple")
    }

    /// Content hash of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        crate::hash_json(&self.to_json())
    }
}

/// Uniform-ish random simple `d`-regular graph by point pairing.
///
/// Points are paired one random pair at a time, refusing pairs that would
/// form a loop or a multi-edge; when no legal pair remains the whole pairing
/// is restarted. Deterministic for a given seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    random_regular_with_budget(n, d, seed, 10_000)
}

pub fn random_regular_with_budget(n: usize, d: usize, seed: u64, budget: usize) -> Result<RegularGraph> {
    if (n * d) % 2 == 1 {
        return Err(Error::DegreeParity { n, d });
    }
    if d >= n && !(n == 0 && d == 0) {
        return Err(Error::InvalidGraph(format!("degree {d} must be < n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        if let Some(adj) = try_pairing(n, d, &mut rng) {
            return RegularGraph::from_adjacency(adj);
        }
    }
    Err(Error::RejectionBudget(budget))
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    points.shuffle(rng);
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let legal = |adj: &Vec<Vec<usize>>, a: usize, b: usize| a != b && !adj[a].contains(&b);
    while !points.is_empty() {
        let len = points.len();
        let mut chosen = None;
        for _ in 0..32 {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            if i != j && legal(&adj, points[i], points[j]) {
                chosen = Some((i, j));
                break;
            }
        }
        if chosen.is_none() {
            let candidates: Vec<(usize, usize)> = (0..len)
                .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
                .filter(|&(i, j)| legal(&adj, points[i], points[j]))
                .collect();
            chosen = Some(*candidates.choose(rng)?);
        }
        let (i, j) = chosen.unwrap();
        let (a, b) = (points[i], points[j]);
        adj[a].push(b);
        adj[b].push(a);
        let (hi, lo) = (i.max(j), i.min(j));
        points.swap_remove(hi);
        points.swap_remove(lo);
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    Some(adj)
}

/// Assignment of a group element to every edge of a base graph, indexed by
/// canonical edge id. The reverse orientation carries the inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signing {
    group: AbelianGroupSpec,
    values: Vec<GroupElement>,
}

/// `{"group":…, "edges":[[u,v,[exponents]],…]}` with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigningJson {
    pub group: GroupDescriptor,
    pub edges: Vec<(usize, usize, Vec<u32>)>,
}

impl Signing {
    pub fn new(base: &Graph, group: AbelianGroupSpec, values: Vec<GroupElement>) -> Result<Self> {
        if values.len() != base.num_edges() {
            return Err(Error::InvalidSigning(format!(
                "{} values for {} edges",
                values.len(),
                base.num_edges()
            )));
        }
        let values = values
            .into_iter()
            .map(|g| group.element(g.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { group, values })
    }

    pub fn identity(base: &Graph, group: AbelianGroupSpec) -> Self {
        let id = group.identity();
        Self {
            values: vec![id; base.num_edges()],
            group,
        }
    }

    /// Signing over `Z_ℓ` from plain residues.
    pub fn cyclic(base: &Graph, l: u32, residues: &[u32]) -> Result<Self> {
        let group = AbelianGroupSpec::cyclic(l)?;
        let values = residues.iter().map(|&r| GroupElement(vec![r % l])).collect();
        Self::new(base, group, values)
    }

    pub fn random(base: &Graph, group: AbelianGroupSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..base.num_edges())
            .map(|_| group.element_at(rng.gen_range(0..group.order())))
            .collect();
        Self { group, values }
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn num_edges(&self) -> usize {
        self.values.len()
    }

    /// `s(u, v)` for the directed edge with the given index.
    pub fn directed_value(&self, directed_index: usize) -> GroupElement {
        let g = &self.values[directed_index / 2];
        if directed_index.is_multiple_of(2) {
            g.clone()
        } else {
            self.group.inverse(g)
        }
    }

    pub fn to_json(&self, base: &Graph) -> SigningJson {
        SigningJson {
            group: self.group.descriptor(),
            edges: base
                .edges()
                .iter()
                .zip(&self.values)
                .map(|(&(u, v), g)| (u + 1, v + 1, g.0.clone()))
                .collect(),
        }
    }

    pub fn from_json(base: &Graph, json: &SigningJson) -> Result<Self> {
        let group = AbelianGroupSpec::from_descriptor(&json.group)?;
        let mut values: Vec<Option<GroupElement>> = vec![None; base.num_edges()];
        for (u, v, ex) in &json.edges {
            let (u, v) = (
                u.checked_sub(1)
                    .ok_or_else(|| Error::InvalidSigning("vertices are 1-based".into()))?,
                v.checked_sub(1)
                    .ok_or_else(|| Error::InvalidSigning("vertices are 1-based".into()))?,
            );
            let e = base
                .edge_id(u, v)
                .ok_or_else(|| Error::InvalidSigning(format!("({},{}) is not an edge", u + 1, v + 1)))?;
            let g = group.element(ex.clone())?;
            let g = if u < v { g } else { group.inverse(&g) };
            if values[e].replace(g).is_some() {
                return Err(Error::InvalidSigning(format!(
                    "edge ({},{}) signed twice",
                    u + 1,
                    v + 1
                )));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(e, g)| {
                g.ok_or_else(|| {
                    let (u, v) = base.edges()[e];
                    Error::InvalidSigning(format!("edge ({},{}) unsigned", u + 1, v + 1))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { group, values })
    }

    fn check_base(&self, base: &Graph) -> Result<()> {
        if self.values.len() != base.num_edges() {
            return Err(Error::InvalidSigning(format!(
                "signing covers {} edges, base has {}",
                self.values.len(),
                base.num_edges()
            )));
        }
        Ok(())
    }

    /// `χ(s(e))` for every canonical edge.
    pub fn character_values(&self, chi: &CharacterIndex) -> Vec<Complex64> {
        self.values.iter().map(|g| self.group.char_eval(chi, g)).collect()
    }
}

/// The lifted graph on `n·ℓ` vertices: `(v, i) ↦ v·ℓ + i`, edge
/// `((u, i), (v, s(u,v)·i))` for every canonical base edge `(u, v)`.
///
/// The lifted edge list is in orbit order: base edge `e`, fiber `i` has id
/// `e·ℓ + i`. Each `(v, i)` lists its neighbors in the base neighbor order of `v`.
pub fn lift(base: &RegularGraph, s: &Signing, allow_non_transitive: bool) -> Result<RegularGraph> {
    s.check_base(base)?;
    let group = s.group();
    if !allow_non_transitive && !group.is_transitive() {
        return Err(Error::NonTransitive);
    }
    let l = group.degree();
    let n = base.n();
    let mut adj = vec![Vec::with_capacity(base.d()); n * l];
    for v in 0..n {
        for (j, &w) in base.neighbors(v).iter().enumerate() {
            let e = base.slot_edge(v, j);
            let g = if v < w {
                s.values[e].clone()
            } else {
                group.inverse(&s.values[e])
            };
            let perm = group.permutation(&g);
            for i in 0..l {
                adj[v * l + i].push(w * l + perm[i]);
            }
        }
    }
    let mut edges = Vec::with_capacity(base.num_edges() * l);
    for (e, &(u, v)) in base.edges().iter().enumerate() {
        let perm = group.permutation(&s.values[e]);
        for (i, &pi) in perm.iter().enumerate() {
            edges.push((u * l + i, v * l + pi));
        }
    }
    for (x, nbrs) in adj.iter().enumerate() {
        let mut sorted = nbrs.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::LiftCollision(format!(
                "lifted vertex {x} has a repeated neighbor"
            )));
        }
    }
    RegularGraph::new(Graph::with_edge_order(adj, edges)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Adjacency,
    NonBacktracking,
}

/// `A(χ)` or `B_s(χ)` as a dense complex matrix.
#[derive(Debug, Clone)]
pub struct SignedOperator {
    pub kind: OperatorKind,
    pub character: CharacterIndex,
    pub matrix: Mat<Complex64>,
    /// Row/column labels for the non-backtracking kind.
    pub directed_edges: Option<Vec<(usize, usize)>>,
}

/// `A(χ)`: entry `(u, v) = χ(s(u, v))` for the canonical orientation, its
/// conjugate for the reverse.
pub fn signed_adjacency(base: &Graph, s: &Signing, chi: &CharacterIndex) -> Result<SignedOperator> {
    s.check_base(base)?;
    let vals = s.character_values(chi);
    let mut m = Mat::<Complex64>::zeros(base.n(), base.n());
    for (e, &(u, v)) in base.edges().iter().enumerate() {
        m[(u, v)] = vals[e];
        m[(v, u)] = vals[e].conj();
    }
    Ok(SignedOperator {
        kind: OperatorKind::Adjacency,
        character: chi.clone(),
        matrix: m,
        directed_edges: None,
    })
}

/// `B_s(χ)`: entry `((u,v),(x,y)) = χ(s(x,y))` iff `v = x` and `u ≠ y`.
pub fn signed_nonbacktracking(base: &Graph, s: &Signing, chi: &CharacterIndex) -> Result<SignedOperator> {
    s.check_base(base)?;
    let dim = 2 * base.num_edges();
    if dim > MAX_NB_DIM {
        return Err(Error::DimensionGuard { dim, limit: MAX_NB_DIM });
    }
    let vals = s.character_values(chi);
    let directed_value = |idx: usize| {
        if idx.is_multiple_of(2) {
            vals[idx / 2]
        } else {
            vals[idx / 2].conj()
        }
    };
    let mut m = Mat::<Complex64>::zeros(dim, dim);
    for a in 0..dim {
        let (u, v) = base.directed_edge(a);
        for (j, &y) in base.neighbors(v).iter().enumerate() {
            if y == u {
                continue;
            }
            let e = base.slot_edge(v, j);
            let b = 2 * e + usize::from(v > y);
            m[(a, b)] = directed_value(b);
        }
    }
    Ok(SignedOperator {
        kind: OperatorKind::NonBacktracking,
        character: chi.clone(),
        matrix: m,
        directed_edges: Some((0..dim).map(|a| base.directed_edge(a)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3_z2(bits: [u32; 3]) -> (RegularGraph, Signing) {
        let g = RegularGraph::cycle(3);
        let s = Signing::cyclic(&g, 2, &bits).unwrap();
        (g, s)
    }

    /// Cycle lengths of a 2-regular graph.
    fn cycle_lengths(g: &Graph) -> Vec<usize> {
        let (label, count) = g.components();
        let mut sizes = vec![0; count];
        for l in label {
            sizes[l] += 1;
        }
        sizes.sort_unstable();
        sizes
    }

    #[test]
    fn lift_of_c3_identity_is_two_triangles() {
        let (g, s) = c3_z2([0, 0, 0]);
        let h = lift(&g, &s, false).unwrap();
        assert_eq!(h.n(), 6);
        assert_eq!(cycle_lengths(&h), vec![3, 3]);
    }

    #[test]
    fn lift_of_c3_with_one_twist_is_c6() {
        let (g, s) = c3_z2([1, 0, 0]);
        let h = lift(&g, &s, false).unwrap();
        assert_eq!(h.d(), 2);
        assert_eq!(cycle_lengths(&h), vec![6]);
    }

    #[test]
    fn lift_of_c4_over_z3_is_c12() {
        let g = RegularGraph::cycle(4);
        let s = Signing::cyclic(&g, 3, &[1, 0, 0, 0]).unwrap();
        let h = lift(&g, &s, false).unwrap();
        assert_eq!(cycle_lengths(&h), vec![12]);
    }

    #[test]
    fn lift_vertex_layout_and_edge_orbits() {
        let g = RegularGraph::complete(4);
        let s = Signing::cyclic(&g, 5, &[1, 2, 3, 4, 0, 1]).unwrap();
        let h = lift(&g, &s, false).unwrap();
        assert_eq!(h.n(), 20);
        assert_eq!(h.d(), 3);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let r = s.values()[e].0[0] as usize;
            for i in 0..5 {
                assert_eq!(h.edges()[e * 5 + i], (u * 5 + i, v * 5 + (i + r) % 5));
            }
        }
    }

    #[test]
    fn non_transitive_lift_needs_override() {
        let g = RegularGraph::cycle(3);
        let group = AbelianGroupSpec::from_generators(vec![vec![1, 0, 3, 2]]).unwrap();
        let s = Signing::identity(&g, group);
        assert!(matches!(lift(&g, &s, false), Err(Error::NonTransitive)));
        let h = lift(&g, &s, true).unwrap();
        assert_eq!(h.components().1, 4);
    }

    #[test]
    fn identity_signing_gives_disjoint_copies() {
        let g = RegularGraph::petersen();
        for l in 2..5 {
            let s = Signing::identity(&g, AbelianGroupSpec::cyclic(l).unwrap());
            let h = lift(&g, &s, true).unwrap();
            assert_eq!(h.components().1, l as usize);
        }
    }

    #[test]
    fn girth_examples() {
        assert_eq!(RegularGraph::complete(4).girth(), Some(3));
        assert_eq!(RegularGraph::cycle(5).girth(), Some(5));
        assert_eq!(RegularGraph::petersen().girth(), Some(5));
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.girth(), None);
    }

    #[test]
    fn bicycle_free_radius_examples() {
        let c = RegularGraph::cycle(9).bicycle_free_radius();
        assert!(c.capped);
        assert_eq!(c.radius, 4);
        assert_eq!(
            RegularGraph::complete(4).bicycle_free_radius(),
            BicycleFreeRadius {
                radius: 0,
                capped: false
            }
        );
        assert_eq!(
            RegularGraph::petersen().bicycle_free_radius(),
            BicycleFreeRadius {
                radius: 1,
                capped: false
            }
        );
    }

    #[test]
    fn random_regular_examples() {
        for seed in 0..5 {
            let k4 = random_regular(4, 3, seed).unwrap();
            assert_eq!(k4.num_edges(), 6);
            assert_eq!(k4.girth(), Some(3));
        }
        let g = random_regular(10, 3, 42).unwrap();
        assert_eq!(g.d(), 3);
        assert!(g.adjacency().iter().all(|l| l.len() == 3));
        assert_eq!(g, random_regular(10, 3, 42).unwrap());
        assert!(matches!(random_regular(5, 3, 0), Err(Error::DegreeParity { .. })));
        assert!(random_regular(4, 4, 0).is_err());
        // dense case that full rejection sampling could never reach
        let dense = random_regular(64, 36, 7).unwrap();
        assert_eq!(dense.d(), 36);
    }

    #[test]
    fn signed_adjacency_examples() {
        let g = RegularGraph::petersen();
        let s = Signing::random(&g, AbelianGroupSpec::cyclic(5).unwrap(), 3);
        let a = signed_adjacency(&g, &s, &CharacterIndex(vec![0])).unwrap();
        let plain = g.adjacency_matrix();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(a.matrix[(i, j)], Complex64::new(plain[(i, j)], 0.0));
            }
        }
        let chi = CharacterIndex(vec![2]);
        let a = signed_adjacency(&g, &s, &chi).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(a.matrix[(i, j)], a.matrix[(j, i)].conj());
            }
        }
        let c4 = RegularGraph::cycle(4);
        let s = Signing::cyclic(&c4, 4, &[1, 0, 0, 0]).unwrap();
        let (u, v) = c4.edges()[0];
        let a = signed_adjacency(&c4, &s, &CharacterIndex(vec![1])).unwrap();
        assert_eq!(a.matrix[(u, v)], Complex64::new(0.0, 1.0));
        assert_eq!(a.matrix[(v, u)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn nonbacktracking_structure() {
        let g = RegularGraph::complete(4);
        let s = Signing::random(&g, AbelianGroupSpec::cyclic(3).unwrap(), 9);
        let triv = signed_nonbacktracking(&g, &s, &CharacterIndex(vec![0])).unwrap();
        let labels = triv.directed_edges.as_ref().unwrap();
        for a in 0..12 {
            let (u, v) = labels[a];
            let rev = g.directed_index(v, u).unwrap();
            assert_eq!(triv.matrix[(a, rev)], Complex64::new(0.0, 0.0));
            for (b, &(x, y)) in labels.iter().enumerate() {
                let expect = if v == x && u != y { 1.0 } else { 0.0 };
                assert_eq!(triv.matrix[(a, b)], Complex64::new(expect, 0.0));
            }
        }
        let b = signed_nonbacktracking(&g, &s, &CharacterIndex(vec![1])).unwrap();
        for a in 0..12 {
            let row: f64 = (0..12).map(|c| b.matrix[(a, c)].norm()).sum();
            assert!((row - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nonbacktracking_guard() {
        let g = random_regular(1400, 3, 1).unwrap();
        let s = Signing::identity(&g, AbelianGroupSpec::cyclic(1).unwrap());
        assert!(matches!(
            signed_nonbacktracking(&g, &s, &CharacterIndex(vec![0])),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn signing_json_roundtrip_and_orientation() {
        let g = RegularGraph::cycle(4);
        let s = Signing::cyclic(&g, 5, &[1, 2, 3, 4]).unwrap();
        let json = s.to_json(&g);
        assert_eq!(Signing::from_json(&g, &json).unwrap(), s);
        // reversed orientation carries the inverse
        let mut flipped = json.clone();
        let (u, v, ex) = flipped.edges[0].clone();
        flipped.edges[0] = (v, u, vec![(5 - ex[0]) % 5]);
        assert_eq!(Signing::from_json(&g, &flipped).unwrap(), s);
        flipped.edges.pop();
        assert!(Signing::from_json(&g, &flipped).is_err());
    }

    #[test]
    fn graph_json_roundtrip() {
        let g = RegularGraph::petersen();
        let json = g.to_json();
        assert_eq!(json.d, 3);
        assert_eq!(RegularGraph::from_json(&json).unwrap(), g);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.starts_with("{\"n\":10,\"d\":3,\"adj\":[["));
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(Graph::from_adjacency(vec![vec![0]]).is_err());
        assert!(Graph::from_adjacency(vec![vec![1, 1], vec![0, 0]]).is_err());
        assert!(Graph::from_adjacency(vec![vec![1], vec![]]).is_err());
        assert!(RegularGraph::from_edges(3, &[(0, 1), (1, 2)]).is_err());
    }
}
