//! Private global min-cut: pad the graph up to a target min-cut value with
//! a privately chosen prefix of a fixed edge schedule, then pick a cut of
//! the padded graph with the exponential mechanism. Stage two either ranges
//! over every cut (exact mode) or over the near-minimum cuts found by
//! repeated random contraction (sampled mode).

use std::collections::{HashSet, VecDeque};

use crate::error::{invalid, require_positive, Error, Result};
use crate::instances::Graph;
use crate::mech::{exp_mechanism_index, sample_weighted};
use crate::rng::RngStream;
use crate::sequential::{run_mechanism, SequentialMechanism};

/// Largest vertex count handled (cuts are stored as 128-bit masks).
pub const MAX_CUT_VERTICES: usize = 128;
/// Largest vertex count for exhaustive cut enumeration.
pub const MAX_ENUMERATION_VERTICES: usize = 20;

/// A cut `(S, V \ S)`, stored by the side that contains vertex 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    n: usize,
    side: u128,
}

impl Cut {
    /// Builds a cut from either side; the stored side always holds vertex 0.
    pub fn from_mask(n: usize, mask: u128) -> Result<Cut> {
        if !(2..=MAX_CUT_VERTICES).contains(&n) {
            return Err(invalid(
                "n",
                format!("cuts need 2..={MAX_CUT_VERTICES} vertices, got {n}"),
            ));
        }
        let full = full_mask(n);
        if mask & !full != 0 {
            return Err(invalid("side", "vertex out of range"));
        }
        let side = if mask & 1 == 1 { mask } else { full & !mask };
        if side == full {
            return Err(invalid(
                "side",
                "a cut side must be a nonempty proper subset",
            ));
        }
        Ok(Cut { n, side })
    }

    pub fn new(n: usize, side: &[usize]) -> Result<Cut> {
        let mut mask = 0u128;
        for &v in side {
            if v >= n.min(MAX_CUT_VERTICES) {
                return Err(invalid("side", format!("vertex {v} out of range")));
            }
            mask |= 1 << v;
        }
        Cut::from_mask(n, mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Side containing vertex 0, as a bitmask.
    pub fn mask(&self) -> u128 {
        self.side
    }

    pub fn side(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.contains(v)).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.side >> v & 1 == 1
    }
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn check_size(graph: &Graph) -> Result<()> {
    if graph.n() < 2 {
        return Err(invalid("graph", "need at least 2 vertices"));
    }
    if graph.n() > MAX_CUT_VERTICES {
        return Err(Error::TooLarge {
            what: "cut routines",
            detail: format!("n = {} > {MAX_CUT_VERTICES}", graph.n()),
        });
    }
    Ok(())
}

fn mask_cost(adj: &[u128], side: u128) -> usize {
    let mut cost = 0;
    let mut rest = side;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        cost += (adj[v] & !side).count_ones() as usize;
    }
    cost
}

/// Number of edges crossing the cut.
pub fn cut_cost(graph: &Graph, cut: &Cut) -> usize {
    graph
        .edges()
        .iter()
        .filter(|&&(u, v)| cut.contains(u) != cut.contains(v))
        .count()
}

/// All `2^(n-1) - 1` cuts with their costs, ordered by side mask.
pub fn enumerate_all_cuts(graph: &Graph) -> Result<Vec<(Cut, usize)>> {
    check_size(graph)?;
    let n = graph.n();
    if n > MAX_ENUMERATION_VERTICES {
        return Err(Error::TooLarge {
            what: "cut enumeration",
            detail: format!("n = {n} > {MAX_ENUMERATION_VERTICES}"),
        });
    }
    let adj = graph.adjacency_masks();
    let count = (1u128 << (n - 1)) - 1;
    Ok((0..count)
        .map(|k| {
            let side = 1 | (k << 1);
            (Cut { n, side }, mask_cost(&adj, side))
        })
        .collect())
}

/// Edges of the complete graph on `n` vertices in lexicographic order;
/// `H_i` is the first `i` of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddingSchedule {
    edges: Vec<(usize, usize)>,
}

impl PaddingSchedule {
    pub fn new(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self { edges }
    }

    /// Number of edges in the complete graph, the largest index.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn prefix(&self, i: usize) -> &[(usize, usize)] {
        &self.edges[..i]
    }

    /// `G ∪ H_i` as a simple graph.
    pub fn padded(&self, graph: &Graph, i: usize) -> Graph {
        graph.union_with(self.prefix(i))
    }
}

/// Unit-capacity max flow by shortest augmenting paths, stopping once the
/// flow reaches `limit`.
fn max_flow(cap: &[Vec<i32>], s: usize, t: usize, limit: usize) -> (usize, Vec<Vec<i32>>) {
    let n = cap.len();
    let mut residual = cap.to_vec();
    let mut flow = 0;
    let mut prev = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    while flow < limit {
        prev.iter_mut().for_each(|p| *p = usize::MAX);
        prev[s] = s;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for v in 0..n {
                if prev[v] == usize::MAX && residual[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            break;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            residual[u][v] -= 1;
            residual[v][u] += 1;
            v = u;
        }
        flow += 1;
    }
    (flow, residual)
}

fn capacities(graph: &Graph) -> Vec<Vec<i32>> {
    let n = graph.n();
    let mut cap = vec![vec![0i32; n]; n];
    for &(u, v) in graph.edges() {
        cap[u][v] = 1;
        cap[v][u] = 1;
    }
    cap
}

/// Minimum over `t` of the 0–t max flow, with the minimizing `t`.
fn min_flow_value(cap: &[Vec<i32>]) -> (usize, usize) {
    let mut best = usize::MAX;
    let mut best_t = 1;
    for t in 1..cap.len() {
        let (f, _) = max_flow(cap, 0, t, best);
        if f < best {
            best = f;
            best_t = t;
        }
        if best == 0 {
            break;
        }
    }
    (best, best_t)
}

/// Exact global min cut, as the minimum over `t` of the 0–t max flow.
pub fn global_min_cut(graph: &Graph) -> Result<(usize, Cut)> {
    check_size(graph)?;
    let n = graph.n();
    let cap = capacities(graph);
    let (best, best_t) = min_flow_value(&cap);
    let (_, residual) = max_flow(&cap, 0, best_t, usize::MAX);
    let mut side = 1u128;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if residual[u][v] > 0 && side >> v & 1 == 0 {
                side |= 1 << v;
                stack.push(v);
            }
        }
    }
    Ok((best, Cut { n, side }))
}

pub fn global_min_cut_value(graph: &Graph) -> Result<usize> {
    check_size(graph)?;
    Ok(min_flow_value(&capacities(graph)).0)
}

/// Side of the component containing vertex 0, if the graph is disconnected.
fn component_cut(graph: &Graph) -> Option<Cut> {
    let adj = graph.adjacency_masks();
    let mut seen = 1u128;
    let mut frontier = 1u128;
    while frontier != 0 {
        let mut next = 0;
        let mut rest = frontier;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            next |= adj[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    (seen != full_mask(graph.n())).then_some(Cut {
        n: graph.n(),
        side: seen,
    })
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        true
    }
}

/// One contraction run on a connected graph: edges are drawn in uniformly
/// random order (partial Fisher–Yates over `edges`) and merged until two
/// super-vertices remain.
fn contract_once(n: usize, edges: &mut [(u32, u32)], rng: &mut RngStream) -> u128 {
    let mut uf = UnionFind::new(n);
    let mut parts = n;
    let m = edges.len();
    let mut i = 0;
    while parts > 2 {
        let j = i + rng.below(m - i);
        edges.swap(i, j);
        let (u, v) = edges[i];
        if uf.union(u, v) {
            parts -= 1;
        }
        i += 1;
    }
    let root = uf.find(0);
    (0..n as u32)
        .filter(|&v| uf.find(v) == root)
        .fold(0u128, |s, v| s | (1 << v))
}

/// Default contraction run count, `n^3 * ceil(ln n)`.
pub fn default_karger_runs(n: usize) -> usize {
    n.pow(3) * (n as f64).ln().ceil().max(1.0) as usize
}

fn karger_with_opt(
    graph: &Graph,
    opt: usize,
    approx_factor: f64,
    num_runs: usize,
    rng: &mut RngStream,
) -> Vec<(Cut, usize)> {
    if num_runs == 0 {
        return Vec::new();
    }
    if let Some(cut) = component_cut(graph) {
        return vec![(cut, 0)];
    }
    let n = graph.n();
    let mut edges: Vec<(u32, u32)> = graph
        .edges()
        .iter()
        .map(|&(u, v)| (u as u32, v as u32))
        .collect();
    let mut seen = HashSet::new();
    for _ in 0..num_runs {
        seen.insert(contract_once(n, &mut edges, rng));
    }
    let adj = graph.adjacency_masks();
    let limit = approx_factor * opt as f64;
    let mut out: Vec<(Cut, usize)> = seen
        .into_iter()
        .map(|side| (Cut { n, side }, mask_cost(&adj, side)))
        .filter(|&(_, c)| c as f64 <= limit)
        .collect();
    out.sort_unstable();
    out
}

/// Distinct cuts of cost at most `approx_factor * OPT` found by `num_runs`
/// independent random contractions, sorted by side mask. A disconnected
/// graph yields the cut around vertex 0's component directly.
pub fn karger_near_min_cuts(
    graph: &Graph,
    approx_factor: f64,
    num_runs: usize,
    rng: &mut RngStream,
) -> Result<Vec<Cut>> {
    check_size(graph)?;
    require_positive("approx_factor", approx_factor)?;
    let opt = global_min_cut_value(graph)?;
    Ok(karger_with_opt(graph, opt, approx_factor, num_runs, rng)
        .into_iter()
        .map(|(c, _)| c)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinCutMode {
    /// Stage two ranges over every cut; `n <= 20`.
    Exact,
    /// Stage two ranges over contraction-sampled near-minimum cuts.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinCutParams {
    /// The `c` in the stage-one target `c * ln n / epsilon`.
    pub target_constant: f64,
    /// Near-minimum factor for sampled candidates.
    pub approx_factor: f64,
    /// Contraction runs; `None` means [`default_karger_runs`].
    pub karger_runs: Option<usize>,
}

impl Default for MinCutParams {
    fn default() -> Self {
        Self {
            target_constant: 8.0,
            approx_factor: 3.0,
            karger_runs: None,
        }
    }
}

/// The min-cut mechanism prepared for one graph: the padding schedule and
/// `OPT(G ∪ H_i)` for every `i` are computed once and reused across draws.
#[derive(Debug, Clone)]
pub struct MinCutMechanism {
    graph: Graph,
    epsilon: f64,
    params: MinCutParams,
    schedule: PaddingSchedule,
    padded_opt: Vec<usize>,
}

impl MinCutMechanism {
    pub fn new(graph: &Graph, epsilon: f64, params: MinCutParams) -> Result<Self> {
        check_size(graph)?;
        require_positive("epsilon", epsilon)?;
        require_positive("target_constant", params.target_constant)?;
        require_positive("approx_factor", params.approx_factor)?;
        let schedule = PaddingSchedule::new(graph.n());
        let padded_opt = padded_opt_values(graph, &schedule)?;
        Ok(Self {
            graph: graph.clone(),
            epsilon,
            params,
            schedule,
            padded_opt,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn schedule(&self) -> &PaddingSchedule {
        &self.schedule
    }

    /// `OPT(G ∪ H_i)` for `i = 0..=C(n,2)`.
    pub fn padded_opt(&self) -> &[usize] {
        &self.padded_opt
    }

    pub fn target(&self) -> f64 {
        self.params.target_constant * (self.graph.n() as f64).ln() / self.epsilon
    }

    /// Stage-one scores `-|OPT(G ∪ H_i) - target|`.
    pub fn stage_one_scores(&self) -> Vec<f64> {
        let t = self.target();
        self.padded_opt
            .iter()
            .map(|&o| -(o as f64 - t).abs())
            .collect()
    }

    fn stage_two(&self, i: usize, candidates: &[(Cut, usize)], rng: &mut RngStream) -> Cut {
        debug_assert!(
            !candidates.is_empty(),
            "padding index {i} has no candidates"
        );
        let scores: Vec<f64> = candidates.iter().map(|&(_, c)| -(c as f64)).collect();
        let k = exp_mechanism_index(&scores, self.epsilon, rng).expect("finite scores");
        candidates[k].0
    }

    /// One draw of the mechanism.
    pub fn sample(&self, mode: MinCutMode, rng: &mut RngStream) -> Result<Cut> {
        match mode {
            MinCutMode::Exact => {
                if self.graph.n() > MAX_ENUMERATION_VERTICES {
                    return Err(Error::TooLarge {
                        what: "exact-mode min-cut",
                        detail: format!("n = {} > {MAX_ENUMERATION_VERTICES}", self.graph.n()),
                    });
                }
                Ok(run_mechanism(&self.exact(), rng))
            }
            MinCutMode::Sampled => {
                let i = exp_mechanism_index(&self.stage_one_scores(), self.epsilon, rng)?;
                let padded = self.schedule.padded(&self.graph, i);
                let runs = self
                    .params
                    .karger_runs
                    .unwrap_or_else(|| default_karger_runs(self.graph.n()));
                let mut contraction = rng.child(i as u64);
                let candidates = karger_with_opt(
                    &padded,
                    self.padded_opt[i],
                    self.params.approx_factor,
                    runs.max(1),
                    &mut contraction,
                );
                Ok(self.stage_two(i, &candidates, rng))
            }
        }
    }

    /// The exact-mode mechanism as a sequence of two choices.
    pub fn exact(&self) -> ExactMinCut<'_> {
        ExactMinCut { mech: self }
    }
}

/// `OPT(G ∪ H_i)` for all `i`. The values are nondecreasing in `i`, so a
/// range whose endpoints agree is constant and needs no further flow runs.
fn padded_opt_values(graph: &Graph, schedule: &PaddingSchedule) -> Result<Vec<usize>> {
    let len = schedule.len();
    let mut out = vec![usize::MAX; len + 1];
    let eval = |i: usize| global_min_cut_value(&schedule.padded(graph, i));
    out[0] = eval(0)?;
    out[len] = eval(len)?;
    let mut stack = vec![(0, len)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo <= 1 {
            continue;
        }
        if out[lo] == out[hi] {
            let v = out[lo];
            out[lo + 1..hi].iter_mut().for_each(|x| *x = v);
            continue;
        }
        let mid = lo + (hi - lo) / 2;
        out[mid] = eval(mid)?;
        stack.push((lo, mid));
        stack.push((mid, hi));
    }
    Ok(out)
}

/// Exact-mode min-cut as a [`SequentialMechanism`]: pick the padding index,
/// then a cut of the padded graph among all cuts.
pub struct ExactMinCut<'a> {
    mech: &'a MinCutMechanism,
}

#[derive(Debug, Clone)]
pub struct ExactMinCutState {
    padding: Option<usize>,
    cut: Option<Cut>,
}

impl ExactMinCut<'_> {
    fn candidates(&self, i: usize) -> Vec<(Cut, usize)> {
        enumerate_all_cuts(&self.mech.schedule.padded(&self.mech.graph, i)).expect("size checked")
    }
}

impl SequentialMechanism for ExactMinCut<'_> {
    type State = ExactMinCutState;
    type Output = Cut;

    fn start(&self) -> ExactMinCutState {
        ExactMinCutState {
            padding: None,
            cut: None,
        }
    }

    fn moves(&self, s: &ExactMinCutState) -> Vec<f64> {
        let eps = self.mech.epsilon;
        match (s.padding, s.cut) {
            (None, _) => self
                .mech
                .stage_one_scores()
                .iter()
                .map(|x| eps * x)
                .collect(),
            (Some(i), None) => self
                .candidates(i)
                .iter()
                .map(|&(_, c)| -eps * c as f64)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn advance(&self, s: &mut ExactMinCutState, choice: usize) {
        match s.padding {
            None => s.padding = Some(choice),
            Some(i) => s.cut = Some(self.candidates(i)[choice].0),
        }
    }

    fn output(&self, s: &ExactMinCutState) -> Cut {
        s.cut.expect("finished run has a cut")
    }
}

/// Private min-cut with default parameters. The returned cut's cost should
/// be measured on the original graph with [`cut_cost`].
pub fn private_min_cut(
    graph: &Graph,
    epsilon: f64,
    mode: MinCutMode,
    rng: &mut RngStream,
) -> Result<Cut> {
    if mode == MinCutMode::Exact && graph.n() > MAX_ENUMERATION_VERTICES {
        return Err(Error::TooLarge {
            what: "exact-mode min-cut",
            detail: format!("n = {} > {MAX_ENUMERATION_VERTICES}", graph.n()),
        });
    }
    MinCutMechanism::new(graph, epsilon, MinCutParams::default())?.sample(mode, rng)
}

/// Draws a cut from an explicit candidate list with weights
/// `exp(-epsilon * cost)`; exposed for callers that build their own lists.
pub fn sample_cut(candidates: &[(Cut, usize)], epsilon: f64, rng: &mut RngStream) -> Result<Cut> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let min = candidates.iter().map(|c| c.1).min().unwrap_or(0);
    let w: Vec<f64> = candidates
        .iter()
        .map(|&(_, c)| (-epsilon * (c - min) as f64).exp())
        .collect();
    Ok(candidates[sample_weighted(&w, rng)].0)
}
