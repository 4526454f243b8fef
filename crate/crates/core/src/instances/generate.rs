//! Instance generators. All are deterministic given their parameters and
//! the state of the supplied stream.

use super::{
    invariant, Graph, IResult, MetricInstance, SetSystem, SubmodularInstance, TerminalPairs,
    WeightedGraph,
};
use crate::rng::RngStream;

fn check_probability(p: f64) -> IResult<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invariant(
            "probability",
            format!("must lie in [0, 1], got {p}"),
        ))
    }
}

/// Erdős–Rényi graph: each of the `C(n, 2)` pairs independently with
/// probability `p`, drawn in lexicographic pair order.
pub fn gen_random_graph(n: usize, p: f64, rng: &mut RngStream) -> IResult<Graph> {
    if n == 0 {
        return Err(invariant("n", "must be at least 1"));
    }
    check_probability(p)?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.uniform() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Star with center 0.
pub fn gen_star_graph(n: usize) -> IResult<Graph> {
    if n < 2 {
        return Err(invariant("n", "a star needs at least 2 vertices"));
    }
    Graph::new(n, (1..n).map(|v| (0, v)))
}

/// Cliques on `0..s` and `s..2s` joined by `bridges` cross edges, spread so
/// that no vertex takes more than `ceil(bridges / s)` of them.
pub fn gen_two_clique_graph(per_side: usize, bridges: usize) -> IResult<Graph> {
    if per_side == 0 {
        return Err(invariant("n_per_side", "must be at least 1"));
    }
    if bridges > per_side * per_side {
        return Err(invariant(
            "bridge_edges",
            format!("at most {} cross pairs exist", per_side * per_side),
        ));
    }
    let s = per_side;
    let mut edges = Vec::new();
    for side in [0, s] {
        for u in 0..s {
            for v in u + 1..s {
                edges.push((side + u, side + v));
            }
        }
    }
    for k in 0..bridges {
        let u = k % s;
        let v = s + (u + k / s) % s;
        edges.push((u, v));
    }
    Graph::new(2 * s, edges)
}

/// Random `d`-regular graph by the configuration model, rejecting pairings
/// with loops or parallel edges.
pub fn gen_random_regular_graph(n: usize, d: usize, rng: &mut RngStream) -> IResult<Graph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(invariant(
            "d",
            format!("no simple {d}-regular graph on {n} vertices"),
        ));
    }
    for _ in 0..10_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        rng.shuffle(&mut stubs);
        let edges: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Ok(g) = Graph::new(n, edges) {
            return Ok(g);
        }
    }
    Err(invariant(
        "d",
        "pairing kept producing loops or parallel edges",
    ))
}

/// Random graph whose vertex weights are drawn uniformly from `classes`.
pub fn gen_weighted_graph(
    n: usize,
    p: f64,
    classes: &[f64],
    rng: &mut RngStream,
) -> IResult<WeightedGraph> {
    if classes.is_empty() {
        return Err(invariant("classes", "need at least one weight"));
    }
    let g = gen_random_graph(n, p, rng)?;
    let weights = (0..n).map(|_| classes[rng.below(classes.len())]).collect();
    WeightedGraph::new(g, weights)
}

fn all_points(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `d(u, v) = diameter` for all distinct points; every point is a demand.
pub fn gen_uniform_metric(n: usize, diameter: f64) -> IResult<MetricInstance> {
    if n == 0 {
        return Err(invariant("n", "must be at least 1"));
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { diameter })
                .collect()
        })
        .collect();
    MetricInstance::new(rows, all_points(n))
}

/// Points `0..n` on a line with `d(i, j) = |i - j|`.
pub fn gen_line_metric(n: usize) -> IResult<MetricInstance> {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect())
        .collect();
    MetricInstance::new(rows, all_points(n))
}

/// `rows x cols` grid with shortest-path (L1) distances.
pub fn gen_grid_metric(rows: usize, cols: usize) -> IResult<MetricInstance> {
    let n = rows * cols;
    let pos = |i: usize| ((i / cols) as f64, (i % cols) as f64);
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (a, b) = (pos(i), pos(j));
                    (a.0 - b.0).abs() + (a.1 - b.1).abs()
                })
                .collect()
        })
        .collect();
    MetricInstance::new(m, all_points(n))
}

/// Shortest-path metric of the complete graph with integer edge lengths
/// uniform in `1..=max_len`.
pub fn gen_random_metric(n: usize, max_len: u32, rng: &mut RngStream) -> IResult<MetricInstance> {
    if n == 0 || max_len == 0 {
        return Err(invariant("n", "need at least one point and max_len >= 1"));
    }
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = 1 + rng.below(max_len as usize) as u32;
            d[i][j] = w as f64;
            d[j][i] = w as f64;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    MetricInstance::new(d, all_points(n))
}

/// Clustered hard instance for k-median: `groups` clusters of `per_group`
/// points, distance 1 inside a cluster and `gap` across clusters. Stands
/// in for the zero-distance pseudometric after rescaling so that distinct
/// points are at least 1 apart.
pub fn gen_kmedian_lb_metric(groups: usize, per_group: usize, gap: f64) -> IResult<MetricInstance> {
    if gap < 1.0 {
        return Err(invariant("gap", "must be at least 1"));
    }
    let n = groups * per_group;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else if i / per_group == j / per_group {
                        1.0
                    } else {
                        gap
                    }
                })
                .collect()
        })
        .collect();
    MetricInstance::new(rows, all_points(n))
}

/// `m` random subsets of `0..n`, each element in each set with probability
/// `p`; any element left out of every set joins one set chosen uniformly.
/// Every element must be covered.
pub fn gen_random_set_system(
    n: usize,
    m: usize,
    p: f64,
    rng: &mut RngStream,
) -> IResult<SetSystem> {
    check_probability(p)?;
    if m == 0 && n > 0 {
        return Err(invariant(
            "m",
            "need at least one set to cover a nonempty universe",
        ));
    }
    let mut sets = vec![Vec::new(); m];
    for set in sets.iter_mut() {
        for e in 0..n {
            if rng.uniform() < p {
                set.push(e);
            }
        }
    }
    for e in 0..n {
        if !sets.iter().any(|s| s.contains(&e)) {
            let i = rng.below(m);
            sets[i].push(e);
        }
    }
    SetSystem::new(n, sets, None, all_points(n))
}

/// Random set system with costs drawn uniformly from `cost_classes`.
pub fn gen_weighted_set_system(
    n: usize,
    m: usize,
    p: f64,
    cost_classes: &[f64],
    rng: &mut RngStream,
) -> IResult<SetSystem> {
    if cost_classes.is_empty() {
        return Err(invariant("cost_classes", "need at least one cost"));
    }
    let base = gen_random_set_system(n, m, p, rng)?;
    let costs = (0..m)
        .map(|_| cost_classes[rng.below(cost_classes.len())])
        .collect();
    SetSystem::new(n, base.sets().to_vec(), Some(costs), base.cover().to_vec())
}

/// Coverage instance: `m` resources each covering elements of `0..universe`
/// with probability `p`; each of `agents` agents targets every coverable
/// element with probability `target_p` (unit weights).
pub fn gen_coverage_instance(
    universe: usize,
    m: usize,
    agents: usize,
    p: f64,
    target_p: f64,
    rng: &mut RngStream,
) -> IResult<SubmodularInstance> {
    check_probability(p)?;
    check_probability(target_p)?;
    let mut resources = vec![Vec::new(); m];
    for r in resources.iter_mut() {
        for e in 0..universe {
            if rng.uniform() < p {
                r.push(e);
            }
        }
    }
    let coverable: Vec<usize> = (0..universe)
        .filter(|e| resources.iter().any(|r| r.contains(e)))
        .collect();
    let agent_targets = (0..agents)
        .map(|_| {
            coverable
                .iter()
                .filter(|_| rng.uniform() < target_p)
                .map(|&e| (e, 1.0))
                .collect()
        })
        .collect();
    SubmodularInstance::new(universe, resources, agent_targets)
}

/// `count` uniformly random pairs of distinct points.
pub fn gen_terminal_pairs(
    points: usize,
    count: usize,
    rng: &mut RngStream,
) -> IResult<TerminalPairs> {
    if points < 2 && count > 0 {
        return Err(invariant("points", "need two points to form a pair"));
    }
    let pairs = (0..count)
        .map(|_| {
            let u = rng.below(points);
            let v = (u + 1 + rng.below(points - 1)) % points;
            (u, v)
        })
        .collect();
    TerminalPairs::new(points, pairs)
}
