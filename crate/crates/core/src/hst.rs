//! Random 2-HST embeddings of a metric, private facility location on the
//! tree, and oblivious Steiner forest routing.

use std::collections::BTreeSet;

use crate::error::{require_positive, Result};
use crate::instances::{MetricInstance, TerminalPairs};
use crate::mech::laplace_noise;
use crate::rng::RngStream;

/// Index of a node inside an [`HstTree`].
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct HstNode {
    pub level: usize,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Metric points in the subtree, sorted.
    pub members: Vec<usize>,
}

/// Rooted tree whose leaves (level 0) are the metric points and whose
/// level-`i` edges (between levels `i + 1` and `i`) have length `2^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HstTree {
    nodes: Vec<HstNode>,
    levels: Vec<Vec<NodeId>>,
    leaf: Vec<NodeId>,
    beta: f64,
}

/// Cluster radius at level `i` for scale `beta`.
pub fn frt_radius(beta: f64, level: usize) -> f64 {
    beta * ((1u64 << level) as f64 - 1.0) / 2.0
}

/// `⌈log2 Δ⌉ + 1`, or 0 for a single point.
pub fn num_levels(diameter: f64) -> usize {
    if diameter <= 0.0 {
        0
    } else {
        diameter.log2().ceil().max(0.0) as usize + 1
    }
}

/// Random hierarchical decomposition: a random order of the points and a
/// scale `beta` in `[1, 2)` with density proportional to `1 / beta`.
/// Reads only the distances, never demands or terminal pairs.
pub fn build_frt_tree(metric: &MetricInstance, rng: &mut RngStream) -> HstTree {
    let n = metric.n();
    let big_l = num_levels(metric.diameter());
    let beta = 2f64.powf(rng.uniform());
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);

    let mut nodes = vec![HstNode {
        level: big_l,
        parent: None,
        children: Vec::new(),
        members: (0..n).collect(),
    }];
    let mut levels = vec![Vec::new(); big_l + 1];
    levels[big_l].push(0);
    for level in (0..big_l).rev() {
        let r = frt_radius(beta, level);
        let parents = levels[level + 1].clone();
        for p in parents {
            let mut unassigned: BTreeSet<usize> = nodes[p].members.iter().copied().collect();
            for &center in &order {
                if unassigned.is_empty() {
                    break;
                }
                let members: Vec<usize> = unassigned
                    .iter()
                    .copied()
                    .filter(|&x| metric.dist(center, x) <= r)
                    .collect();
                if members.is_empty() {
                    continue;
                }
                for x in &members {
                    unassigned.remove(x);
                }
                let id = nodes.len();
                nodes.push(HstNode {
                    level,
                    parent: Some(p),
                    children: Vec::new(),
                    members,
                });
                nodes[p].children.push(id);
                levels[level].push(id);
            }
        }
    }
    let mut leaf = vec![0; n];
    for &id in &levels[0] {
        leaf[nodes[id].members[0]] = id;
    }
    HstTree {
        nodes,
        levels,
        leaf,
        beta,
    }
}

impl HstTree {
    pub fn root(&self) -> NodeId {
        0
    }

    /// Number of levels `L`; the root sits at level `L`.
    pub fn height(&self) -> usize {
        self.nodes[0].level
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nodes(&self) -> &[HstNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &HstNode {
        &self.nodes[id]
    }

    pub fn level_nodes(&self, level: usize) -> &[NodeId] {
        &self.levels[level]
    }

    pub fn leaf(&self, point: usize) -> NodeId {
        self.leaf[point]
    }

    /// Length of the edge from `id` to its parent.
    pub fn edge_length(&self, id: NodeId) -> f64 {
        (1u64 << self.nodes[id].level) as f64
    }

    /// Nodes from the leaf of `point` up to the root.
    pub fn ancestors(&self, point: usize) -> Vec<NodeId> {
        let mut out = vec![self.leaf[point]];
        while let Some(p) = self.nodes[*out.last().unwrap()].parent {
            out.push(p);
        }
        out
    }

    /// Level of the lowest common ancestor of two points.
    pub fn meeting_level(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (self.leaf[u], self.leaf[v]);
        while a != b {
            a = self.nodes[a].parent.expect("leaves share the root");
            b = self.nodes[b].parent.expect("leaves share the root");
        }
        self.nodes[a].level
    }
}

/// Path length between two leaves: `2 (2^l - 1)` for meeting level `l`.
pub fn tree_distance(tree: &HstTree, u: usize, v: usize) -> f64 {
    2.0 * ((1u64 << tree.meeting_level(u, v)) as f64 - 1.0)
}

#[derive(Debug, Clone)]
pub struct FacilityPlan {
    pub tree: HstTree,
    /// Open nodes, sorted; always contains the root.
    pub open: Vec<NodeId>,
}

impl FacilityPlan {
    pub fn is_open(&self, id: NodeId) -> bool {
        self.open.binary_search(&id).is_ok()
    }

    /// Text export: one line per node with level, parent, open flag and
    /// members.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# levels {} beta {}\n",
            self.tree.height(),
            self.tree.beta()
        );
        for (id, node) in self.tree.nodes().iter().enumerate() {
            let parent = node.parent.map_or("-".to_string(), |p| p.to_string());
            let members: Vec<String> = node.members.iter().map(|m| m.to_string()).collect();
            out.push_str(&format!(
                "node {id} level {} parent {parent} open {} members {}\n",
                node.level,
                u8::from(self.is_open(id)),
                members.join(",")
            ));
        }
        out
    }
}

/// Subtree demand counts `N_v` for every node.
pub fn subtree_counts(tree: &HstTree, demands: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; tree.nodes().len()];
    for &d in demands {
        for a in tree.ancestors(d) {
            counts[a] += 1;
        }
    }
    counts
}

/// Noisy counts `N_v + Lap(L / epsilon)` for every node at levels `1..=L`,
/// one child stream per node; leaves get `None`.
pub fn noisy_counts(
    tree: &HstTree,
    demands: &[usize],
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<Vec<Option<f64>>> {
    require_positive("epsilon", epsilon)?;
    let counts = subtree_counts(tree, demands);
    let scale = tree.height() as f64 / epsilon;
    let mut out = vec![None; counts.len()];
    for (id, node) in tree.nodes().iter().enumerate() {
        if node.level >= 1 {
            let mut child = rng.child(id as u64);
            out[id] = Some(counts[id] as f64 + laplace_noise(scale, &mut child)?);
        }
    }
    Ok(out)
}

/// Builds a tree from the metric alone, then opens every node at level `i`
/// with noisy count times `2^i` strictly above `f`; the root is always
/// open. The demands are the metric's demand points.
pub fn private_facility_location(
    metric: &MetricInstance,
    facility_cost: f64,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<FacilityPlan> {
    require_positive("facility_cost", facility_cost)?;
    require_positive("epsilon", epsilon)?;
    let tree = build_frt_tree(metric, &mut rng.child(u64::MAX));
    let noisy = noisy_counts(&tree, metric.demands(), epsilon, rng)?;
    let mut open = vec![tree.root()];
    for (id, node) in tree.nodes().iter().enumerate() {
        if id == tree.root() {
            continue;
        }
        if let Some(c) = noisy[id] {
            if c * (1u64 << node.level) as f64 > facility_cost {
                open.push(id);
            }
        }
    }
    open.sort_unstable();
    Ok(FacilityPlan { tree, open })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `(demand point, facility node)` pairs.
    pub assigned: Vec<(usize, NodeId)>,
    pub connection_cost: f64,
    /// `f` times the number of facilities with at least one demand.
    pub facility_cost: f64,
}

impl Assignment {
    pub fn total(&self) -> f64 {
        self.connection_cost + self.facility_cost
    }
}

/// Sends each demand to its lowest open ancestor; the path from a leaf up
/// to level `a` has length `2^a - 1`.
pub fn assign_demands(plan: &FacilityPlan, demands: &[usize], facility_cost: f64) -> Assignment {
    let mut assigned = Vec::with_capacity(demands.len());
    let mut used = BTreeSet::new();
    let mut connection_cost = 0.0;
    for &d in demands {
        let fac = plan
            .tree
            .ancestors(d)
            .into_iter()
            .find(|&a| plan.is_open(a))
            .expect("root is open");
        connection_cost += (1u64 << plan.tree.node(fac).level) as f64 - 1.0;
        used.insert(fac);
        assigned.push((d, fac));
    }
    Assignment {
        assigned,
        connection_cost,
        facility_cost: facility_cost * used.len() as f64,
    }
}

/// Routes every pair along its tree path. Returns the union of tree edges
/// (each named by its lower endpoint) and its total length.
pub fn steiner_forest_route(
    metric: &MetricInstance,
    pairs: &TerminalPairs,
    rng: &mut RngStream,
) -> (Vec<NodeId>, f64) {
    let tree = build_frt_tree(metric, rng);
    route_on_tree(&tree, pairs)
}

pub fn route_on_tree(tree: &HstTree, pairs: &TerminalPairs) -> (Vec<NodeId>, f64) {
    let mut edges = BTreeSet::new();
    for &(u, v) in pairs.pairs() {
        let (mut a, mut b) = (tree.leaf(u), tree.leaf(v));
        while a != b {
            edges.insert(a);
            edges.insert(b);
            a = tree.node(a).parent.expect("shared root");
            b = tree.node(b).parent.expect("shared root");
        }
    }
    let cost = edges.iter().map(|&e| tree.edge_length(e)).sum();
    (edges.into_iter().collect(), cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate::{gen_grid_metric, gen_random_metric, gen_uniform_metric};

    fn check_structure(tree: &HstTree, metric: &MetricInstance) {
        assert_eq!(tree.height(), num_levels(metric.diameter()));
        assert_eq!(tree.node(tree.root()).members.len(), metric.n());
        for (id, node) in tree.nodes().iter().enumerate() {
            if let Some(p) = node.parent {
                assert_eq!(tree.node(p).level, node.level + 1);
                assert_eq!(tree.edge_length(id), 2f64.powi(node.level as i32));
            }
            if node.level == 0 {
                assert_eq!(node.members.len(), 1);
            }
        }
        for u in 0..metric.n() {
            for v in 0..metric.n() {
                assert!(tree_distance(tree, u, v) >= metric.dist(u, v), "{u} {v}");
            }
            assert_eq!(tree_distance(tree, u, u), 0.0);
        }
    }

    #[test]
    fn degenerate_trees() {
        let one = MetricInstance::new(vec![vec![0.0]], vec![0]).unwrap();
        let t = build_frt_tree(&one, &mut RngStream::new(0, 0));
        assert_eq!(t.height(), 0);
        assert_eq!(t.leaf(0), t.root());
        assert_eq!(tree_distance(&t, 0, 0), 0.0);

        let two = gen_uniform_metric(2, 1.0).unwrap();
        let t = build_frt_tree(&two, &mut RngStream::new(0, 0));
        assert_eq!(t.height(), 1);
        assert_eq!(t.node(t.root()).children.len(), 2);
        assert_eq!(tree_distance(&t, 0, 1), 2.0);
    }

    #[test]
    fn domination_and_level_lengths() {
        for seed in 0..200 {
            let mut rng = RngStream::new(seed, 0);
            let m = gen_random_metric(9, 20, &mut rng).unwrap();
            let t = build_frt_tree(&m, &mut rng);
            check_structure(&t, &m);
        }
        let grid = gen_grid_metric(4, 4).unwrap();
        for seed in 0..50 {
            check_structure(&build_frt_tree(&grid, &mut RngStream::new(seed, 1)), &grid);
        }
    }

    #[test]
    fn grid_stretch() {
        let grid = gen_grid_metric(4, 4).unwrap();
        let trees: Vec<HstTree> = (0..500)
            .map(|s| build_frt_tree(&grid, &mut RngStream::new(s, 2)))
            .collect();
        let bound = 8.0 * 16f64.ln();
        for u in 0..16 {
            for v in (u + 1)..16 {
                let mean: f64 = trees.iter().map(|t| tree_distance(t, u, v)).sum::<f64>() / 500.0;
                assert!(mean / grid.dist(u, v) <= bound, "{u} {v}");
            }
        }
    }

    #[test]
    fn beta_density() {
        let mut rng = RngStream::new(3, 0);
        let m = gen_uniform_metric(2, 1.0).unwrap();
        let below: usize = (0..20_000)
            .filter(|_| build_frt_tree(&m, &mut rng).beta() < 2f64.sqrt())
            .count();
        // Pr[beta < sqrt 2] = 1/2 under the 1/beta density
        assert!((below as f64 / 20_000.0 - 0.5).abs() < 0.015);
    }

    #[test]
    fn counts_follow_root_path() {
        let m = gen_line_like();
        let t = build_frt_tree(&m, &mut RngStream::new(5, 0));
        let counts = subtree_counts(&t, &[2]);
        let path = t.ancestors(2);
        for (id, &c) in counts.iter().enumerate() {
            assert_eq!(c, usize::from(path.contains(&id)));
        }
    }

    fn gen_line_like() -> MetricInstance {
        crate::instances::generate::gen_line_metric(6).unwrap()
    }

    #[test]
    fn root_only_assignment() {
        let m = gen_line_like();
        let tree = build_frt_tree(&m, &mut RngStream::new(1, 0));
        let plan = FacilityPlan {
            open: vec![tree.root()],
            tree,
        };
        let a = assign_demands(&plan, &[0, 3], 5.0);
        assert_eq!(a.facility_cost, 5.0);
        let l = plan.tree.height() as i32;
        assert_eq!(a.connection_cost, 2.0 * (2f64.powi(l) - 1.0));
        assert_eq!(assign_demands(&plan, &[], 5.0).total(), 0.0);
    }

    #[test]
    fn parent_open_assignment() {
        let m = gen_line_like();
        let tree = build_frt_tree(&m, &mut RngStream::new(1, 0));
        let parent = tree.node(tree.leaf(4)).parent.unwrap();
        let mut open = vec![tree.root(), parent];
        open.sort_unstable();
        open.dedup();
        let plan = FacilityPlan { tree, open };
        let a = assign_demands(&plan, &[4], 1.0);
        assert_eq!(a.assigned, vec![(4, parent)]);
        assert_eq!(a.connection_cost, 1.0);
    }

    #[test]
    fn empty_demands_open_by_noise_tail() {
        let m = gen_uniform_metric(4, 4.0)
            .unwrap()
            .with_demands(vec![])
            .unwrap();
        let f = 3.0;
        let eps = 1.0;
        let trials = 20_000;
        let mut opened = 0usize;
        let mut slots = 0usize;
        let rng = RngStream::new(9, 0);
        for t in 0..trials {
            let plan = private_facility_location(&m, f, eps, &mut rng.child(t)).unwrap();
            assert_eq!(plan.tree.level_nodes(1).len(), 4);
            assert!(plan.is_open(plan.tree.root()));
            for &id in plan.tree.level_nodes(1) {
                if id != plan.tree.root() {
                    slots += 1;
                    opened += usize::from(plan.is_open(id));
                }
            }
        }
        let l = num_levels(4.0) as f64;
        let expect = 0.5 * (-(f / 2.0) * eps / l).exp();
        let freq = opened as f64 / slots as f64;
        let sigma = (expect * (1.0 - expect) / slots as f64).sqrt();
        assert!((freq - expect).abs() < 4.0 * sigma, "{freq} vs {expect}");
    }

    #[test]
    fn noise_is_independent_across_nodes() {
        let m = gen_line_like();
        let tree = build_frt_tree(&m, &mut RngStream::new(0, 0));
        let ids: Vec<NodeId> = tree
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, n)| n.level >= 1)
            .map(|(i, _)| i)
            .take(2)
            .collect();
        let runs = 10_000;
        let mut xs = Vec::with_capacity(runs);
        let mut ys = Vec::with_capacity(runs);
        for r in 0..runs {
            let c = noisy_counts(&tree, &[], 1.0, &mut RngStream::new(r as u64, 7)).unwrap();
            xs.push(c[ids[0]].unwrap());
            ys.push(c[ids[1]].unwrap());
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let cov: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / runs as f64;
        let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / runs as f64;
        let corr = cov / (var(&xs, mx) * var(&ys, my)).sqrt();
        assert!(corr.abs() < 4.0 / (runs as f64).sqrt(), "{corr}");
    }

    #[test]
    fn steiner_routing() {
        let m = gen_random_metric(8, 10, &mut RngStream::new(4, 0)).unwrap();
        let empty = TerminalPairs::new(8, vec![]).unwrap();
        assert_eq!(
            steiner_forest_route(&m, &empty, &mut RngStream::new(0, 0)),
            (vec![], 0.0)
        );
        let one = TerminalPairs::new(8, vec![(1, 5)]).unwrap();
        let tree = build_frt_tree(&m, &mut RngStream::new(0, 0));
        let (_, cost) = route_on_tree(&tree, &one);
        assert_eq!(cost, tree_distance(&tree, 1, 5));
        assert!(cost >= m.dist(1, 5));

        let many = TerminalPairs::new(8, vec![(0, 1), (1, 2), (3, 7), (0, 2)]).unwrap();
        for seed in 0..100 {
            let t = build_frt_tree(&m, &mut RngStream::new(seed, 3));
            let (_, cost) = route_on_tree(&t, &many);
            let sum: f64 = many
                .pairs()
                .iter()
                .map(|&(u, v)| tree_distance(&t, u, v))
                .sum();
            assert!(cost <= sum + 1e-9);
        }
        let trees: Vec<HstTree> = (0..500)
            .map(|s| build_frt_tree(&m, &mut RngStream::new(s, 5)))
            .collect();
        for u in 0..8 {
            for v in (u + 1)..8 {
                let pair = TerminalPairs::new(8, vec![(u, v)]).unwrap();
                let mean = trees.iter().map(|t| route_on_tree(t, &pair).1).sum::<f64>() / 500.0;
                assert!(mean / m.dist(u, v) <= 8.0 * 8f64.ln());
            }
        }
    }
}
