//! Neighbouring inputs under each problem's notion of a private unit.

use crate::error::Result;
use crate::instances::{Graph, MetricInstance, SetSystem, SubmodularInstance};

/// Every graph differing from `graph` in exactly one edge.
pub fn edge_neighbors(graph: &Graph) -> Vec<Graph> {
    let n = graph.n();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            out.push(graph.toggled(u, v));
        }
    }
    out
}

/// All `2^C(n,2)` graphs on `n` vertices (`n <= 7`).
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    assert!(pairs.len() <= 21, "too many graphs");
    (0..1u32 << pairs.len())
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            Graph::new(n, edges).expect("pairs are valid")
        })
        .collect()
}

/// Each unordered adjacent pair of `n`-vertex graphs once.
pub fn edge_adjacent_pairs(n: usize) -> Vec<(Graph, Graph)> {
    let mut out = Vec::new();
    for g in all_graphs(n) {
        for u in 0..n {
            for v in (u + 1)..n {
                if !g.has_edge(u, v) {
                    out.push((g.clone(), g.toggled(u, v)));
                }
            }
        }
    }
    out
}

/// Systems whose required set `R` differs in one element. Elements that no
/// set covers are skipped since `R` must stay coverable.
pub fn element_neighbors(system: &SetSystem) -> Result<Vec<SetSystem>> {
    let coverable = |e: usize| system.sets().iter().any(|s| s.contains(&e));
    let mut out = Vec::new();
    for e in (0..system.universe()).filter(|&e| coverable(e)) {
        let mut cover = system.cover().to_vec();
        match cover.binary_search(&e) {
            Ok(i) => {
                cover.remove(i);
            }
            Err(i) => cover.insert(i, e),
        }
        out.push(system.with_cover(cover)?);
    }
    Ok(out)
}

/// Instances with one agent removed.
pub fn agent_neighbors(instance: &SubmodularInstance) -> Vec<SubmodularInstance> {
    (0..instance.agents().len())
        .map(|i| instance.without_agent(i))
        .collect()
}

/// Metrics whose demand set differs in one point.
pub fn demand_neighbors(metric: &MetricInstance) -> Result<Vec<MetricInstance>> {
    let mut out = Vec::with_capacity(metric.n());
    for p in 0..metric.n() {
        let mut d = metric.demands().to_vec();
        match d.binary_search(&p) {
            Ok(i) => {
                d.remove(i);
            }
            Err(i) => d.insert(i, p),
        }
        out.push(metric.with_demands(d)?);
    }
    Ok(out)
}
