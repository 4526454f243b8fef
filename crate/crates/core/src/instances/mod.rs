//! Instance data model. Constructors enforce every type invariant, so any
//! value of these types (generated, parsed or built by hand) is valid.

pub mod format;
pub mod generate;

use std::collections::BTreeSet;

use thiserror::Error;

pub use format::{parse_instance, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    #[error("`{field}`: {message}")]
    Invariant { field: String, message: String },
}

pub(crate) fn invariant(field: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Invariant {
        field: field.into(),
        message: message.into(),
    }
}

type IResult<T> = std::result::Result<T, InstanceError>;

/// Slack allowed when checking the triangle inequality.
pub const TRIANGLE_SLACK: f64 = 1e-9;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, storing each edge as `(low, high)` in sorted order.
    /// Rejects self-loops, out-of-range endpoints and repeated edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> IResult<Self> {
        let mut set = BTreeSet::new();
        for (i, (u, v)) in edges.into_iter().enumerate() {
            let field = format!("edges[{i}]");
            if u >= n || v >= n {
                return Err(invariant(
                    field,
                    format!("endpoint out of range for n = {n}"),
                ));
            }
            if u == v {
                return Err(invariant(field, "self-loop"));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(invariant(field, format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
        })
    }

    /// Simple-graph union with the extra edges (duplicates absorbed).
    pub fn union_with(&self, extra: &[(usize, usize)]) -> Graph {
        let mut set: BTreeSet<(usize, usize)> = self.edges.iter().copied().collect();
        for &(u, v) in extra {
            debug_assert!(u != v && u < self.n && v < self.n);
            set.insert((u.min(v), u.max(v)));
        }
        Graph {
            n: self.n,
            edges: set.into_iter().collect(),
        }
    }

    /// The graph with edge `{u, v}` added if absent or removed if present.
    pub fn toggled(&self, u: usize, v: usize) -> Graph {
        let e = (u.min(v), u.max(v));
        let mut edges = self.edges.clone();
        match edges.binary_search(&e) {
            Ok(i) => {
                edges.remove(i);
            }
            Err(i) => edges.insert(i, e),
        }
        Graph { n: self.n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Neighbor bitmasks; requires `n <= 128`.
    pub fn adjacency_masks(&self) -> Vec<u128> {
        assert!(self.n <= 128, "bitmask adjacency needs n <= 128");
        let mut m = vec![0u128; self.n];
        for &(u, v) in &self.edges {
            m[u] |= 1 << v;
            m[v] |= 1 << u;
        }
        m
    }

    /// Checks that every edge has an endpoint in `cover`.
    pub fn is_vertex_cover(&self, cover: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &v in cover {
            if v < self.n {
                inside[v] = true;
            }
        }
        self.edges.iter().all(|&(u, v)| inside[u] || inside[v])
    }
}

/// A graph with vertex weights, all at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<f64>) -> IResult<Self> {
        if weights.len() != graph.n() {
            return Err(invariant(
                "weights",
                format!("expected {} weights, got {}", graph.n(), weights.len()),
            ));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 1.0) {
                return Err(invariant(
                    format!("weights[{i}]"),
                    format!("must be finite and >= 1, got {w}"),
                ));
            }
        }
        Ok(Self { graph, weights })
    }

    /// Scales positive weights so the smallest becomes 1; returns the
    /// divisor alongside.
    pub fn normalized(graph: Graph, weights: Vec<f64>) -> IResult<(Self, f64)> {
        let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min.is_finite() && min > 0.0) {
            return Err(invariant("weights", "weights must be positive and finite"));
        }
        let scaled = weights.iter().map(|w| w / min).collect();
        Ok((Self::new(graph, scaled)?, min))
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cover_cost(&self, cover: &[usize]) -> f64 {
        cover.iter().map(|&v| self.weights[v]).sum()
    }
}

/// Finite metric with a distance matrix and a demand set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    n: usize,
    dist: Vec<f64>,
    demands: Vec<usize>,
}

impl MetricInstance {
    /// Validates symmetry, zero diagonal, off-diagonal distances >= 1 and
    /// the triangle inequality; demands are stored sorted.
    pub fn new(rows: Vec<Vec<f64>>, demands: Vec<usize>) -> IResult<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invariant(
                    format!("dist[{i}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            dist.extend_from_slice(row);
        }
        let at = |i: usize, j: usize| dist[i * n + j];
        for i in 0..n {
            if at(i, i) != 0.0 {
                return Err(invariant(format!("dist[{i}][{i}]"), "diagonal must be 0"));
            }
            for j in 0..n {
                let d = at(i, j);
                if i != j && !(d.is_finite() && d >= 1.0) {
                    return Err(invariant(
                        format!("dist[{i}][{j}]"),
                        format!("off-diagonal distances must be finite and >= 1, got {d}"),
                    ));
                }
                if d != at(j, i) {
                    return Err(invariant(
                        format!("dist[{i}][{j}]"),
                        "matrix is not symmetric",
                    ));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if at(i, k) > at(i, j) + at(j, k) + TRIANGLE_SLACK {
                        return Err(invariant(
                            format!("dist[{i}][{k}]"),
                            format!("triangle inequality fails through point {j}"),
                        ));
                    }
                }
            }
        }
        let demands = sorted_unique_subset(demands, n, "demands")?;
        Ok(Self { n, dist, demands })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    pub fn demands(&self) -> &[usize] {
        &self.demands
    }

    /// Maximum distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Same metric, different demand set.
    pub fn with_demands(&self, demands: Vec<usize>) -> IResult<Self> {
        let demands = sorted_unique_subset(demands, self.n, "demands")?;
        Ok(Self {
            n: self.n,
            dist: self.dist.clone(),
            demands,
        })
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

fn sorted_unique_subset(mut items: Vec<usize>, bound: usize, field: &str) -> IResult<Vec<usize>> {
    for (i, &x) in items.iter().enumerate() {
        if x >= bound {
            return Err(invariant(
                format!("{field}[{i}]"),
                format!("{x} out of range for size {bound}"),
            ));
        }
    }
    items.sort_unstable();
    for w in items.windows(2) {
        if w[0] == w[1] {
            return Err(invariant(field, format!("{} listed twice", w[0])));
        }
    }
    Ok(items)
}

/// Set system over universe `0..universe`, with the elements that must be
/// covered and optional per-set costs.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSystem {
    universe: usize,
    sets: Vec<Vec<usize>>,
    costs: Option<Vec<f64>>,
    cover: Vec<usize>,
}

impl SetSystem {
    pub fn new(
        universe: usize,
        sets: Vec<Vec<usize>>,
        costs: Option<Vec<f64>>,
        cover: Vec<usize>,
    ) -> IResult<Self> {
        let sets = sets
            .into_iter()
            .enumerate()
            .map(|(i, s)| sorted_unique_subset(s, universe, &format!("sets[{i}]")))
            .collect::<IResult<Vec<_>>>()?;
        if let Some(c) = &costs {
            if c.len() != sets.len() {
                return Err(invariant(
                    "costs",
                    format!("expected {} costs, got {}", sets.len(), c.len()),
                ));
            }
            for (i, &x) in c.iter().enumerate() {
                if !(x.is_finite() && x > 0.0) {
                    return Err(invariant(
                        format!("costs[{i}]"),
                        format!("must be positive and finite, got {x}"),
                    ));
                }
            }
        }
        let cover = sorted_unique_subset(cover, universe, "cover")?;
        let mut coverable = vec![false; universe];
        for s in &sets {
            for &e in s {
                coverable[e] = true;
            }
        }
        if let Some(&e) = cover.iter().find(|&&e| !coverable[e]) {
            return Err(invariant("cover", format!("element {e} is in no set")));
        }
        Ok(Self {
            universe,
            sets,
            costs,
            cover,
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn costs(&self) -> Option<&[f64]> {
        self.costs.as_deref()
    }

    /// Cost of set `i` (1 when the system is unweighted).
    pub fn cost(&self, i: usize) -> f64 {
        self.costs.as_ref().map_or(1.0, |c| c[i])
    }

    pub fn cover(&self) -> &[usize] {
        &self.cover
    }

    /// The elements that must be covered, as a bitmask (universe <= 128).
    pub fn cover_mask(&self) -> u128 {
        assert!(self.universe <= 128);
        self.cover.iter().fold(0, |m, &e| m | (1 << e))
    }

    /// Per-set bitmasks (universe <= 128).
    pub fn set_masks(&self) -> Vec<u128> {
        assert!(self.universe <= 128);
        self.sets
            .iter()
            .map(|s| s.iter().fold(0, |m, &e| m | (1 << e)))
            .collect()
    }

    /// Same sets and costs with a different set of elements to cover.
    pub fn with_cover(&self, cover: Vec<usize>) -> IResult<Self> {
        Self::new(self.universe, self.sets.clone(), self.costs.clone(), cover)
    }

    /// Scales costs so the minimum becomes 1. Returns the divisor (1 for
    /// unweighted systems).
    pub fn normalized_costs(&self) -> (SetSystem, f64) {
        match &self.costs {
            None => (self.clone(), 1.0),
            Some(c) => {
                let min = c.iter().copied().fold(f64::INFINITY, f64::min);
                let mut out = self.clone();
                out.costs = Some(c.iter().map(|x| x / min).collect());
                (out, if min.is_finite() { min } else { 1.0 })
            }
        }
    }

    /// Ratio of the largest to the smallest cost.
    pub fn cost_ratio(&self) -> f64 {
        match &self.costs {
            None => 1.0,
            Some(c) if c.is_empty() => 1.0,
            Some(c) => {
                let max = c.iter().copied().fold(0.0, f64::max);
                let min = c.iter().copied().fold(f64::INFINITY, f64::min);
                max / min
            }
        }
    }
}

/// One agent of a coverage valuation: target elements with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    targets: Vec<(usize, f64)>,
}

impl Agent {
    pub fn targets(&self) -> &[(usize, f64)] {
        &self.targets
    }

    pub fn total_weight(&self) -> f64 {
        self.targets.iter().map(|t| t.1).sum()
    }
}

/// Resources cover subsets of an agent universe; agent `i` values a resource
/// set by the weighted fraction of its targets covered.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularInstance {
    universe: usize,
    resources: Vec<Vec<usize>>,
    agents: Vec<Agent>,
}

impl SubmodularInstance {
    pub fn new(
        universe: usize,
        resources: Vec<Vec<usize>>,
        agents: Vec<Vec<(usize, f64)>>,
    ) -> IResult<Self> {
        let resources = resources
            .into_iter()
            .enumerate()
            .map(|(i, r)| sorted_unique_subset(r, universe, &format!("resources[{i}]")))
            .collect::<IResult<Vec<_>>>()?;
        let mut coverable = vec![false; universe];
        for r in &resources {
            for &e in r {
                coverable[e] = true;
            }
        }
        let mut out = Vec::with_capacity(agents.len());
        for (i, mut targets) in agents.into_iter().enumerate() {
            targets.sort_by_key(|t| t.0);
            for (j, &(e, w)) in targets.iter().enumerate() {
                let field = format!("agents[{i}].targets[{j}]");
                if e >= universe {
                    return Err(invariant(field, format!("element {e} out of range")));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(invariant(
                        field,
                        format!("weight must be positive and finite, got {w}"),
                    ));
                }
                if !coverable[e] {
                    return Err(invariant(
                        field,
                        format!("element {e} is covered by no resource"),
                    ));
                }
                if j > 0 && targets[j - 1].0 == e {
                    return Err(invariant(field, format!("element {e} listed twice")));
                }
            }
            out.push(Agent { targets });
        }
        Ok(Self {
            universe,
            resources,
            agents: out,
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn resources(&self) -> &[Vec<usize>] {
        &self.resources
    }

    pub fn num_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    /// The instance with agent `i` removed.
    pub fn without_agent(&self, i: usize) -> SubmodularInstance {
        let mut out = self.clone();
        out.agents.remove(i);
        out
    }

    /// The instance with one more agent appended.
    pub fn with_agent(&self, targets: Vec<(usize, f64)>) -> IResult<SubmodularInstance> {
        let mut agents: Vec<Vec<(usize, f64)>> =
            self.agents.iter().map(|a| a.targets.clone()).collect();
        agents.push(targets);
        Self::new(self.universe, self.resources.clone(), agents)
    }
}

/// Terminal pairs over points `0..points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalPairs {
    points: usize,
    pairs: Vec<(usize, usize)>,
}

impl TerminalPairs {
    pub fn new(points: usize, pairs: Vec<(usize, usize)>) -> IResult<Self> {
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if u >= points || v >= points {
                return Err(invariant(format!("pairs[{i}]"), "point out of range"));
            }
            if u == v {
                return Err(invariant(format!("pairs[{i}]"), "endpoints must differ"));
            }
        }
        Ok(Self { points, pairs })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}
