//! Exact optima by exhaustive search on small instances.

use itertools::Itertools;

use crate::cpp::total_welfare;
use crate::error::{invalid, Error, Result};
use crate::instances::format::Instance;
use crate::instances::{Graph, MetricInstance, SetSystem, SubmodularInstance, WeightedGraph};
use crate::k_median::{kmedian_cost, MedianSet};
use crate::min_cut::{enumerate_all_cuts, Cut};

pub const MAX_VC_VERTICES: usize = 24;
pub const MAX_SC_SETS: usize = 20;
pub const MAX_SUBSETS: u128 = 1_000_000;
pub const MAX_FL_POINTS: usize = 16;

fn too_large(what: &'static str, detail: String) -> Error {
    Error::TooLarge { what, detail }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Cheapest cut by enumeration (`2 <= n <= 20`).
pub fn brute_min_cut(graph: &Graph) -> Result<(usize, Cut)> {
    let cuts = enumerate_all_cuts(graph)?;
    let (cut, cost) = cuts
        .into_iter()
        .min_by_key(|&(_, c)| c)
        .expect("n >= 2 gives a cut");
    Ok((cost, cut))
}

/// Minimum vertex cover size with one optimal cover.
pub fn brute_vertex_cover(graph: &Graph) -> Result<(usize, Vec<usize>)> {
    let (cost, cover) = vc_branch_and_bound(graph, &vec![1.0; graph.n()])?;
    Ok((cost as usize, cover))
}

/// Minimum-weight vertex cover with one optimal cover.
pub fn brute_weighted_vertex_cover(wgraph: &WeightedGraph) -> Result<(f64, Vec<usize>)> {
    vc_branch_and_bound(wgraph.graph(), wgraph.weights())
}

fn vc_branch_and_bound(graph: &Graph, weights: &[f64]) -> Result<(f64, Vec<usize>)> {
    let n = graph.n();
    if n > MAX_VC_VERTICES {
        return Err(too_large(
            "vertex cover search",
            format!("n = {n} > {MAX_VC_VERTICES}"),
        ));
    }
    let adj = graph.adjacency_masks();
    let all = if n == 0 { 0 } else { (1u128 << n) - 1 };
    let mut best = (f64::INFINITY, 0u128);
    vc_rec(&adj, weights, all, 0, 0.0, &mut best);
    let cover = (0..n).filter(|&v| best.1 >> v & 1 == 1).collect();
    Ok((best.0, cover))
}

/// `rem` holds undecided vertices; edges inside `rem` are still uncovered.
fn vc_rec(adj: &[u128], w: &[f64], rem: u128, chosen: u128, cost: f64, best: &mut (f64, u128)) {
    if cost >= best.0 {
        return;
    }
    let mut pick = None;
    let mut rest = rem;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & rem).count_ones();
        if d > 0 && pick.is_none_or(|(_, bd)| d > bd) {
            pick = Some((v, d));
        }
    }
    let Some((v, _)) = pick else {
        *best = (cost, chosen);
        return;
    };
    vc_rec(adj, w, rem & !(1 << v), chosen | 1 << v, cost + w[v], best);
    let nb = adj[v] & rem;
    let nb_cost: f64 = (0..w.len())
        .filter(|&u| nb >> u & 1 == 1)
        .map(|u| w[u])
        .sum();
    vc_rec(
        adj,
        w,
        rem & !nb & !(1 << v),
        chosen | nb,
        cost + nb_cost,
        best,
    );
}

/// Cheapest family of sets covering the required elements.
pub fn brute_set_cover(system: &SetSystem) -> Result<(f64, Vec<usize>)> {
    let m = system.num_sets();
    if m > MAX_SC_SETS {
        return Err(too_large(
            "set cover search",
            format!("m = {m} > {MAX_SC_SETS}"),
        ));
    }
    if system.universe() > 128 {
        return Err(too_large(
            "set cover search",
            format!("universe {} > 128", system.universe()),
        ));
    }
    let masks = system.set_masks();
    let costs: Vec<f64> = (0..m).map(|i| system.cost(i)).collect();
    let mut best = (f64::INFINITY, 0u32);
    sc_rec(&masks, &costs, system.cover_mask(), 0, 0.0, &mut best);
    Ok((best.0, (0..m).filter(|&i| best.1 >> i & 1 == 1).collect()))
}

fn sc_rec(
    masks: &[u128],
    costs: &[f64],
    uncovered: u128,
    chosen: u32,
    cost: f64,
    best: &mut (f64, u32),
) {
    if cost >= best.0 {
        return;
    }
    if uncovered == 0 {
        *best = (cost, chosen);
        return;
    }
    // element with the fewest sets still available
    let mut rest = uncovered;
    let mut pick: Option<(u128, usize)> = None;
    while rest != 0 {
        let e = rest.trailing_zeros();
        rest &= rest - 1;
        let bit = 1u128 << e;
        let count = (0..masks.len())
            .filter(|&i| chosen >> i & 1 == 0 && masks[i] & bit != 0)
            .count();
        if pick.is_none_or(|(_, c)| count < c) {
            pick = Some((bit, count));
        }
    }
    let (bit, _) = pick.expect("uncovered is nonempty");
    for i in 0..masks.len() {
        if chosen >> i & 1 == 0 && masks[i] & bit != 0 {
            sc_rec(
                masks,
                costs,
                uncovered & !masks[i],
                chosen | 1 << i,
                cost + costs[i],
                best,
            );
        }
    }
}

/// Best `k` medians by enumeration (`C(n, k) <= 10^6`).
pub fn brute_kmedian(metric: &MetricInstance, k: usize) -> Result<(f64, MedianSet)> {
    let n = metric.n();
    if k == 0 || k > n {
        return Err(invalid("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    if binomial(n, k) > MAX_SUBSETS {
        return Err(too_large(
            "k-median search",
            format!("C({n}, {k}) > {MAX_SUBSETS}"),
        ));
    }
    let mut best = (f64::INFINITY, Vec::new());
    for s in (0..n).combinations(k) {
        let c = kmedian_cost(metric, &s);
        if c < best.0 {
            best = (c, s);
        }
    }
    Ok(best)
}

/// Highest-welfare `k` resources by enumeration (`C(m, k) <= 10^6`).
pub fn brute_cpp(instance: &SubmodularInstance, k: usize) -> Result<(f64, Vec<usize>)> {
    let m = instance.num_resources();
    if k > m {
        return Err(invalid("k", format!("k = {k} exceeds m = {m}")));
    }
    if binomial(m, k) > MAX_SUBSETS {
        return Err(too_large(
            "resource search",
            format!("C({m}, {k}) > {MAX_SUBSETS}"),
        ));
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for s in (0..m).combinations(k) {
        let w = total_welfare(instance, &s);
        if w > best.0 {
            best = (w, s);
        }
    }
    Ok(best)
}

/// Uniform-cost facility location over the metric's demand points:
/// minimum of `Σ_d d(d, F) + f |F|` over facility sets `F`.
pub fn brute_facility_location(
    metric: &MetricInstance,
    facility_cost: f64,
) -> Result<(f64, Vec<usize>)> {
    let n = metric.n();
    if n > MAX_FL_POINTS {
        return Err(too_large(
            "facility search",
            format!("n = {n} > {MAX_FL_POINTS}"),
        ));
    }
    if metric.demands().is_empty() {
        return Ok((0.0, Vec::new()));
    }
    let mut best = (f64::INFINITY, 0u32);
    for mask in 1u32..(1 << n) {
        let open = mask.count_ones() as f64 * facility_cost;
        if open >= best.0 {
            continue;
        }
        let conn: f64 = metric
            .demands()
            .iter()
            .map(|&d| {
                (0..n)
                    .filter(|&f| mask >> f & 1 == 1)
                    .map(|f| metric.dist(d, f))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        if open + conn < best.0 {
            best = (open + conn, mask);
        }
    }
    Ok((best.0, (0..n).filter(|&f| best.1 >> f & 1 == 1).collect()))
}

/// Problem tag for [`brute_opt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleProblem {
    MinCut,
    VertexCover,
    SetCover,
    KMedian { k: usize },
    Cpp { k: usize },
    FacilityLocation { facility_cost: f64 },
}

/// Optimum value of `instance` for the tagged problem.
pub fn brute_opt(problem: OracleProblem, instance: &Instance) -> Result<f64> {
    let mismatch = || {
        invalid(
            "instance",
            format!("{} does not fit {problem:?}", instance.kind()),
        )
    };
    match (problem, instance) {
        (OracleProblem::MinCut, Instance::Graph(g)) => Ok(brute_min_cut(g)?.0 as f64),
        (OracleProblem::VertexCover, Instance::Graph(g)) => Ok(brute_vertex_cover(g)?.0 as f64),
        (OracleProblem::VertexCover, Instance::WeightedGraph(w)) => {
            Ok(brute_weighted_vertex_cover(w)?.0)
        }
        (OracleProblem::SetCover, Instance::SetSystem(s)) => Ok(brute_set_cover(s)?.0),
        (OracleProblem::KMedian { k }, Instance::Metric(m)) => Ok(brute_kmedian(m, k)?.0),
        (OracleProblem::Cpp { k }, Instance::Submodular(s)) => Ok(brute_cpp(s, k)?.0),
        (OracleProblem::FacilityLocation { facility_cost }, Instance::Metric(m)) => {
            Ok(brute_facility_location(m, facility_cost)?.0)
        }
        _ => Err(mismatch()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate::*;
    use crate::rng::RngStream;

    fn naive_vc(g: &Graph, w: &[f64]) -> f64 {
        let n = g.n();
        (0u32..1 << n)
            .filter(|mask| {
                g.edges()
                    .iter()
                    .all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1)
            })
            .map(|mask| {
                (0..n)
                    .filter(|&v| mask >> v & 1 == 1)
                    .map(|v| w[v])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn closed_forms() {
        for n in 3..10 {
            assert_eq!(
                brute_vertex_cover(&gen_star_graph(n).unwrap()).unwrap().0,
                1
            );
        }
        let k4 = Graph::new(4, (0..4).flat_map(|u| ((u + 1)..4).map(move |v| (u, v)))).unwrap();
        assert_eq!(brute_vertex_cover(&k4).unwrap().0, 3);
        assert_eq!(
            brute_min_cut(&gen_two_clique_graph(4, 2).unwrap())
                .unwrap()
                .0,
            2
        );
        assert_eq!(
            brute_min_cut(&gen_two_clique_graph(4, 3).unwrap())
                .unwrap()
                .0,
            3
        );
        assert_eq!(
            brute_vertex_cover(&Graph::new(5, []).unwrap()).unwrap(),
            (0, vec![])
        );
    }

    #[test]
    fn vc_matches_naive() {
        for seed in 0..60 {
            let mut rng = RngStream::new(seed, 0);
            let g = gen_random_graph(10, 0.35, &mut rng).unwrap();
            let (size, cover) = brute_vertex_cover(&g).unwrap();
            assert!(g.is_vertex_cover(&cover));
            assert_eq!(size as f64, naive_vc(&g, &[1.0; 10]));
            let wg = gen_weighted_graph(10, 0.35, &[1.0, 2.5, 7.0], &mut rng).unwrap();
            let (cost, cover) = brute_weighted_vertex_cover(&wg).unwrap();
            assert!(wg.graph().is_vertex_cover(&cover));
            assert!((cost - naive_vc(wg.graph(), wg.weights())).abs() < 1e-9);
        }
    }

    #[test]
    fn set_cover_matches_naive() {
        for seed in 0..40 {
            let mut rng = RngStream::new(seed, 1);
            let s = gen_weighted_set_system(12, 8, 0.25, &[1.0, 3.0, 10.0], &mut rng).unwrap();
            let (cost, chosen) = brute_set_cover(&s).unwrap();
            let naive = (0u32..1 << 8)
                .filter(|mask| {
                    let u = (0..8)
                        .filter(|i| mask >> i & 1 == 1)
                        .fold(0u128, |a, i| a | s.set_masks()[i]);
                    u & s.cover_mask() == s.cover_mask()
                })
                .map(|mask| {
                    (0..8)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| s.cost(i))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            assert!((cost - naive).abs() < 1e-9);
            assert!((chosen.iter().map(|&i| s.cost(i)).sum::<f64>() - cost).abs() < 1e-9);
        }
    }

    #[test]
    fn kmedian_and_facility() {
        let m = gen_kmedian_lb_metric(3, 3, 100.0).unwrap();
        let (c, _) = brute_kmedian(&m, 3).unwrap();
        assert_eq!(c, 6.0);
        assert!(brute_kmedian(&m, 0).is_err());
        let line = gen_line_metric(5).unwrap();
        // one facility in the middle: 2 + 1 + 0 + 1 + 2
        assert_eq!(
            brute_facility_location(&line, 100.0).unwrap(),
            (106.0, vec![2])
        );
        // free facilities everywhere
        assert_eq!(brute_facility_location(&line, 1e-9).unwrap().1.len(), 5);
    }

    #[test]
    fn cpp_and_dispatch() {
        let inst = SubmodularInstance::new(
            2,
            vec![vec![0], vec![1]],
            vec![vec![(0, 1.0)], vec![(1, 1.0)]],
        )
        .unwrap();
        assert_eq!(brute_cpp(&inst, 2).unwrap().0, 2.0);
        let g = gen_star_graph(6).unwrap();
        assert_eq!(
            brute_opt(OracleProblem::VertexCover, &Instance::Graph(g.clone())).unwrap(),
            1.0
        );
        assert_eq!(
            brute_opt(OracleProblem::MinCut, &Instance::Graph(g.clone())).unwrap(),
            1.0
        );
        assert!(brute_opt(OracleProblem::SetCover, &Instance::Graph(g)).is_err());
    }
}
