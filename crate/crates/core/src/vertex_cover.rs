//! Private vertex cover. The mechanisms output an ordering of all vertices;
//! each edge is then covered by whichever endpoint comes first, so the cover
//! itself is never released.

use crate::error::{invalid, require_positive, Result};
use crate::instances::{Graph, WeightedGraph};
use crate::rng::RngStream;
use crate::sequential::{run_mechanism, SequentialMechanism};

/// An ordering of all vertices, each exactly once.
pub type VertexPermutation = Vec<usize>;

fn check_permutation(n: usize, perm: &[usize]) -> Result<()> {
    if perm.len() != n {
        return Err(invalid(
            "permutation",
            format!("expected {n} vertices, got {}", perm.len()),
        ));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return Err(invalid(
                "permutation",
                format!("vertex {v} out of range or repeated"),
            ));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Covers each edge by its earlier endpoint in `perm`; returns the sorted
/// cover.
pub fn decode_cover(graph: &Graph, perm: &[usize]) -> Result<Vec<usize>> {
    check_permutation(graph.n(), perm)?;
    let mut pos = vec![0; graph.n()];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    let mut inside = vec![false; graph.n()];
    for &(u, v) in graph.edges() {
        inside[if pos[u] < pos[v] { u } else { v }] = true;
    }
    Ok((0..graph.n()).filter(|&v| inside[v]).collect())
}

/// The step-`i` smoothing weight `(4/epsilon) * sqrt(n / (n - i + 1))`,
/// for `1 <= i <= n`.
pub fn uvc_weight(n: usize, epsilon: f64, i: usize) -> f64 {
    debug_assert!(1 <= i && i <= n);
    4.0 / epsilon * (n as f64 / (n - i + 1) as f64).sqrt()
}

/// State shared by the sequential vertex samplers.
#[derive(Debug, Clone)]
pub struct VcState {
    order: Vec<usize>,
    emitted: Vec<bool>,
    remaining_degree: Vec<usize>,
    /// Members of the class being dumped that are still to be emitted.
    dumping: Vec<usize>,
}

impl VcState {
    fn new(graph: &Graph) -> Self {
        Self {
            order: Vec::with_capacity(graph.n()),
            emitted: vec![false; graph.n()],
            remaining_degree: graph.degrees(),
            dumping: Vec::new(),
        }
    }

    fn remaining(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.emitted.len()).filter(|&v| !self.emitted[v])
    }

    fn emit(&mut self, adj: &[Vec<usize>], v: usize) {
        self.emitted[v] = true;
        self.order.push(v);
        for &u in &adj[v] {
            if !self.emitted[u] {
                self.remaining_degree[u] -= 1;
            }
        }
    }
}

/// Unweighted private vertex cover: at step `i` a surviving vertex is drawn
/// with probability proportional to its remaining degree plus
/// [`uvc_weight`].
pub struct UnweightedVc<'a> {
    graph: &'a Graph,
    adj: Vec<Vec<usize>>,
    epsilon: f64,
}

impl<'a> UnweightedVc<'a> {
    pub fn new(graph: &'a Graph, epsilon: f64) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        Ok(Self {
            graph,
            adj: graph.adjacency(),
            epsilon,
        })
    }
}

impl SequentialMechanism for UnweightedVc<'_> {
    type State = VcState;
    type Output = VertexPermutation;

    fn start(&self) -> VcState {
        VcState::new(self.graph)
    }

    fn moves(&self, s: &VcState) -> Vec<f64> {
        let n = self.graph.n();
        if s.order.len() == n {
            return Vec::new();
        }
        let w = uvc_weight(n, self.epsilon, s.order.len() + 1);
        s.remaining()
            .map(|v| (s.remaining_degree[v] as f64 + w).ln())
            .collect()
    }

    fn advance(&self, s: &mut VcState, choice: usize) {
        let v = s.remaining().nth(choice).expect("valid move");
        s.emit(&self.adj, v);
    }

    fn output(&self, s: &VcState) -> VertexPermutation {
        s.order.clone()
    }
}

pub fn private_vc_unweighted(
    graph: &Graph,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<VertexPermutation> {
    Ok(run_mechanism(&UnweightedVc::new(graph, epsilon)?, rng))
}

/// Weights rounded up to powers of two and grouped by exponent. Every class
/// is treated as if padded with edgeless fake vertices to the size of the
/// largest class.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightClassLayout {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    padded_size: usize,
}

impl WeightClassLayout {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let mut class_of = Vec::with_capacity(weights.len());
        for (v, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 1.0) {
                return Err(invalid("weights", format!("vertex {v} has weight {w} < 1")));
            }
            let mut j = 0;
            while ((1u64 << j) as f64) < w {
                j += 1;
            }
            class_of.push(j);
        }
        let top = class_of.iter().copied().max().map_or(0, |j| j + 1);
        let mut classes = vec![Vec::new(); top];
        for (v, &j) in class_of.iter().enumerate() {
            classes[j].push(v);
        }
        let padded_size = classes.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            class_of,
            classes,
            padded_size,
        })
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// Real members of class `j` (weight `2^j` after rounding).
    pub fn class(&self, j: usize) -> &[usize] {
        &self.classes[j]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Common padded class size `N`.
    pub fn padded_size(&self) -> usize {
        self.padded_size
    }

    /// Number of fake vertices added to class `j`.
    pub fn fake_count(&self, j: usize) -> usize {
        self.padded_size - self.classes[j].len()
    }

    pub fn rounded_weight(&self, v: usize) -> f64 {
        (1u64 << self.class_of[v]) as f64
    }
}

/// Hallucinated edges per vertex, `ceil(1 / epsilon)`.
pub fn hallucinated_edges(epsilon: f64) -> usize {
    (1.0 / epsilon).ceil() as usize
}

/// Weighted private vertex cover. Each step picks an uncovered real or
/// hallucinated edge with probability proportional to its score and then an
/// endpoint proportional to the endpoint's score `1 / w`; summed over edges
/// this draws vertex `v` with probability proportional to
/// `(remaining degree + h) / w(v)`. Whenever at least half of a padded class
/// `j` worth of vertices of class `>= j` has been output, the rest of `V_j`
/// is dumped in random order, smallest such `j` first.
pub struct WeightedVc<'a> {
    graph: &'a Graph,
    adj: Vec<Vec<usize>>,
    layout: WeightClassLayout,
    hallucinated: f64,
}

impl<'a> WeightedVc<'a> {
    pub fn new(wgraph: &'a WeightedGraph, epsilon: f64) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        Ok(Self {
            graph: wgraph.graph(),
            adj: wgraph.graph().adjacency(),
            layout: WeightClassLayout::new(wgraph.weights())?,
            hallucinated: hallucinated_edges(epsilon) as f64,
        })
    }

    pub fn layout(&self) -> &WeightClassLayout {
        &self.layout
    }

    fn start_dump_if_due(&self, s: &mut VcState) {
        let mut at_or_above = vec![0usize; self.layout.num_classes() + 1];
        for &v in &s.order {
            at_or_above[self.layout.class_of(v)] += 1;
        }
        for j in (0..self.layout.num_classes()).rev() {
            at_or_above[j] += at_or_above[j + 1];
        }
        for j in 0..self.layout.num_classes() {
            let rest: Vec<usize> = self
                .layout
                .class(j)
                .iter()
                .copied()
                .filter(|&v| !s.emitted[v])
                .collect();
            if !rest.is_empty() && 2 * at_or_above[j] >= self.layout.padded_size() {
                s.dumping = rest;
                return;
            }
        }
    }
}

impl SequentialMechanism for WeightedVc<'_> {
    type State = VcState;
    type Output = VertexPermutation;

    fn start(&self) -> VcState {
        VcState::new(self.graph)
    }

    fn moves(&self, s: &VcState) -> Vec<f64> {
        if !s.dumping.is_empty() {
            return vec![0.0; s.dumping.len()];
        }
        if s.order.len() == self.graph.n() {
            return Vec::new();
        }
        s.remaining()
            .map(|v| {
                ((s.remaining_degree[v] as f64 + self.hallucinated) / self.layout.rounded_weight(v))
                    .ln()
            })
            .collect()
    }

    fn advance(&self, s: &mut VcState, choice: usize) {
        if s.dumping.is_empty() {
            let v = s.remaining().nth(choice).expect("valid move");
            s.emit(&self.adj, v);
        } else {
            let v = s.dumping.remove(choice);
            s.emit(&self.adj, v);
        }
        if s.dumping.is_empty() {
            self.start_dump_if_due(s);
        }
    }

    fn output(&self, s: &VcState) -> VertexPermutation {
        s.order.clone()
    }
}

pub fn private_vc_weighted(
    wgraph: &WeightedGraph,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<VertexPermutation> {
    Ok(run_mechanism(&WeightedVc::new(wgraph, epsilon)?, rng))
}

/// Degree-proportional variant: the first `ceil(alpha * n)` picks are drawn
/// with probability proportional to remaining degree plus `1/epsilon`, the
/// rest in uniformly random order.
pub struct HallucinatedVc<'a> {
    graph: &'a Graph,
    adj: Vec<Vec<usize>>,
    epsilon: f64,
    proportional_steps: usize,
}

impl<'a> HallucinatedVc<'a> {
    pub fn new(graph: &'a Graph, epsilon: f64, alpha: f64) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        Ok(Self {
            graph,
            adj: graph.adjacency(),
            epsilon,
            proportional_steps: (alpha * graph.n() as f64).ceil() as usize,
        })
    }
}

impl SequentialMechanism for HallucinatedVc<'_> {
    type State = VcState;
    type Output = VertexPermutation;

    fn start(&self) -> VcState {
        VcState::new(self.graph)
    }

    fn moves(&self, s: &VcState) -> Vec<f64> {
        if s.order.len() == self.graph.n() {
            return Vec::new();
        }
        if s.order.len() < self.proportional_steps {
            let h = 1.0 / self.epsilon;
            s.remaining()
                .map(|v| (s.remaining_degree[v] as f64 + h).ln())
                .collect()
        } else {
            vec![0.0; self.graph.n() - s.order.len()]
        }
    }

    fn advance(&self, s: &mut VcState, choice: usize) {
        let v = s.remaining().nth(choice).expect("valid move");
        s.emit(&self.adj, v);
    }

    fn output(&self, s: &VcState) -> VertexPermutation {
        s.order.clone()
    }
}

pub fn private_vc_hallucinated(
    graph: &Graph,
    epsilon: f64,
    alpha: f64,
    rng: &mut RngStream,
) -> Result<VertexPermutation> {
    Ok(run_mechanism(
        &HallucinatedVc::new(graph, epsilon, alpha)?,
        rng,
    ))
}

/// Privacy level `2 alpha / (1 - alpha) * epsilon` of the degree-proportional
/// variant.
pub fn hallucinated_privacy(epsilon: f64, alpha: f64) -> f64 {
    2.0 * alpha / (1.0 - alpha) * epsilon
}

/// Expected cover-to-OPT bound `(2/e')(1 + 1/ln(1/(1-alpha)))` of the
/// degree-proportional variant, with `e' = 1/(1 + 1/epsilon)`.
pub fn hallucinated_ratio_bound(epsilon: f64, alpha: f64) -> f64 {
    let eps_prime = 1.0 / (1.0 + 1.0 / epsilon);
    2.0 / eps_prime * (1.0 + 1.0 / (1.0 / (1.0 - alpha)).ln())
}
