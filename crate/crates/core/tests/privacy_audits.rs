//! Exact privacy audits across adjacent inputs on tiny fixtures.

use dpcomb::audit::adjacency::{
    agent_neighbors, demand_neighbors, edge_adjacent_pairs, element_neighbors,
};
use dpcomb::audit::{
    exact_distribution_by, exact_output_distribution, symmetric_hockey_stick, symmetric_log_ratio,
    DEFAULT_BUDGET,
};
use dpcomb::cpp::{cpp_epsilon_prime, cpp_privacy, CppGreedy};
use dpcomb::instances::generate::{
    gen_coverage_instance, gen_random_set_system, gen_weighted_set_system,
};
use dpcomb::instances::{Graph, MetricInstance, SetSystem, SubmodularInstance, WeightedGraph};
use dpcomb::k_median::{LocalSearch, LocalSearchParams};
use dpcomb::min_cut::{MinCutMechanism, MinCutParams};
use dpcomb::set_cover::{permutation_of, UnweightedSc, WeightedSc};
use dpcomb::vertex_cover::{hallucinated_privacy, HallucinatedVc, UnweightedVc, WeightedVc};
use dpcomb::RngStream;

const TOL: f64 = 1e-9;

#[test]
fn unweighted_vertex_cover_is_epsilon_private() {
    for eps in [0.5, 1.0, 2.0] {
        let mut worst: f64 = 0.0;
        for (a, b) in edge_adjacent_pairs(4) {
            let da =
                exact_output_distribution(&UnweightedVc::new(&a, eps).unwrap(), DEFAULT_BUDGET)
                    .unwrap();
            let db =
                exact_output_distribution(&UnweightedVc::new(&b, eps).unwrap(), DEFAULT_BUDGET)
                    .unwrap();
            assert!((da.total() - 1.0).abs() < 1e-12);
            worst = worst.max(symmetric_log_ratio(&da, &db));
        }
        assert!(worst <= eps + TOL, "eps {eps}: measured {worst}");
    }
}

#[test]
fn exact_min_cut_is_two_epsilon_private() {
    for eps in [0.5, 1.0] {
        let mut worst: f64 = 0.0;
        for (a, b) in edge_adjacent_pairs(4) {
            let ma = MinCutMechanism::new(&a, eps, MinCutParams::default()).unwrap();
            let mb = MinCutMechanism::new(&b, eps, MinCutParams::default()).unwrap();
            let da = exact_output_distribution(&ma.exact(), DEFAULT_BUDGET).unwrap();
            let db = exact_output_distribution(&mb.exact(), DEFAULT_BUDGET).unwrap();
            assert!((da.total() - 1.0).abs() < 1e-12);
            worst = worst.max(symmetric_log_ratio(&da, &db));
        }
        assert!(worst <= 2.0 * eps + TOL, "eps {eps}: measured {worst}");
    }
}

fn set_cover_fixtures() -> Vec<SetSystem> {
    let mut out = vec![
        SetSystem::new(3, vec![vec![0, 1, 2], vec![0]], None, vec![0, 1, 2]).unwrap(),
        SetSystem::new(
            4,
            vec![vec![0, 1], vec![2, 3], vec![1, 2], vec![3]],
            None,
            vec![0, 3],
        )
        .unwrap(),
    ];
    for seed in 0..6 {
        let mut rng = RngStream::new(seed, 0);
        out.push(gen_random_set_system(4, 4, 0.4, &mut rng).unwrap());
    }
    out
}

#[test]
fn unweighted_set_cover_hockey_stick() {
    let delta = 0.05;
    for eps in [0.5, 1.0] {
        for sys in set_cover_fixtures() {
            let da = exact_output_distribution(
                &UnweightedSc::new(&sys, eps, delta).unwrap(),
                DEFAULT_BUDGET,
            )
            .unwrap();
            for nb in element_neighbors(&sys).unwrap() {
                let db = exact_output_distribution(
                    &UnweightedSc::new(&nb, eps, delta).unwrap(),
                    DEFAULT_BUDGET,
                )
                .unwrap();
                let d = symmetric_hockey_stick(&da, &db, eps);
                assert!(d <= delta + TOL, "eps {eps}: delta {d}");
            }
        }
    }
}

#[test]
fn weighted_set_cover_hockey_stick() {
    let delta = 0.05;
    let eps = 1.0;
    for seed in 0..4 {
        let mut rng = RngStream::new(seed, 1);
        let sys = gen_weighted_set_system(3, 3, 0.5, &[1.0, 2.0], &mut rng).unwrap();
        let public = |s: &SetSystem| {
            exact_distribution_by(
                &WeightedSc::new(s, eps, delta).unwrap(),
                DEFAULT_BUDGET,
                |ev| permutation_of(ev),
            )
            .unwrap()
        };
        let full = |s: &SetSystem| {
            exact_output_distribution(&WeightedSc::new(s, eps, delta).unwrap(), DEFAULT_BUDGET)
                .unwrap()
        };
        let (pa, fa) = (public(&sys), full(&sys));
        assert!((fa.total() - 1.0).abs() < 1e-12);
        for nb in element_neighbors(&sys).unwrap() {
            assert!(symmetric_hockey_stick(&pa, &public(&nb), eps) <= delta + TOL);
            assert!(symmetric_hockey_stick(&fa, &full(&nb), eps) <= delta + TOL);
        }
    }
}

fn coverage_fixtures() -> Vec<SubmodularInstance> {
    let mut out = vec![SubmodularInstance::new(
        3,
        vec![vec![0], vec![1], vec![0, 2]],
        vec![vec![(0, 1.0)], vec![(1, 1.0), (2, 1.0)], vec![(2, 2.0)]],
    )
    .unwrap()];
    for seed in 0..6 {
        let mut rng = RngStream::new(seed, 2);
        out.push(gen_coverage_instance(4, 3, 3, 0.5, 0.6, &mut rng).unwrap());
    }
    out
}

#[test]
fn cpp_greedy_hockey_stick() {
    let delta = 0.1;
    let eps_prime = cpp_epsilon_prime(1.0, delta).unwrap();
    let eps = cpp_privacy(eps_prime, delta);
    for inst in coverage_fixtures() {
        let da = exact_output_distribution(
            &CppGreedy::with_round_epsilon(&inst, 2, eps_prime).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        for nb in agent_neighbors(&inst) {
            let db = exact_output_distribution(
                &CppGreedy::with_round_epsilon(&nb, 2, eps_prime).unwrap(),
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(symmetric_hockey_stick(&da, &db, eps) <= delta + TOL);
        }
    }
}

#[test]
fn cpp_pure_variant_ratio() {
    let eps = 1.0;
    for inst in coverage_fixtures() {
        let da =
            exact_output_distribution(&CppGreedy::pure(&inst, 2, eps).unwrap(), DEFAULT_BUDGET)
                .unwrap();
        for nb in agent_neighbors(&inst) {
            let db =
                exact_output_distribution(&CppGreedy::pure(&nb, 2, eps).unwrap(), DEFAULT_BUDGET)
                    .unwrap();
            assert!(symmetric_log_ratio(&da, &db) <= eps + TOL);
        }
    }
}

#[test]
fn weighted_vertex_cover_measured_constant() {
    let eps = 1.0;
    let mut worst: f64 = 0.0;
    for (a, b) in edge_adjacent_pairs(4) {
        let wa = WeightedGraph::new(a, vec![2.0; 4]).unwrap();
        let wb = WeightedGraph::new(b, vec![2.0; 4]).unwrap();
        let da =
            exact_output_distribution(&WeightedVc::new(&wa, eps).unwrap(), DEFAULT_BUDGET).unwrap();
        let db =
            exact_output_distribution(&WeightedVc::new(&wb, eps).unwrap(), DEFAULT_BUDGET).unwrap();
        worst = worst.max(symmetric_log_ratio(&da, &db));
    }
    let c = worst / eps;
    println!("weighted vertex cover measured constant c = {c:.4}");
    assert!(c.is_finite() && c <= 4.0);
}

#[test]
fn hallucinated_vertex_cover_bound() {
    let (eps, alpha) = (1.0, 0.5);
    let mut worst: f64 = 0.0;
    for (a, b) in edge_adjacent_pairs(4) {
        let da = exact_output_distribution(
            &HallucinatedVc::new(&a, eps, alpha).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let db = exact_output_distribution(
            &HallucinatedVc::new(&b, eps, alpha).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        worst = worst.max(symmetric_log_ratio(&da, &db));
    }
    assert!(worst <= hallucinated_privacy(eps, alpha) + TOL, "{worst}");
}

#[test]
fn local_search_transcript_is_epsilon_private() {
    let rows = vec![
        vec![0.0, 1.0, 2.0, 3.0],
        vec![1.0, 0.0, 1.0, 2.0],
        vec![2.0, 1.0, 0.0, 1.0],
        vec![3.0, 2.0, 1.0, 0.0],
    ];
    let eps = 1.0;
    let params = LocalSearchParams { rounds: Some(2) };
    for demands in [vec![0, 1, 2, 3], vec![0, 3], vec![2]] {
        let m = MetricInstance::new(rows.clone(), demands).unwrap();
        let da = exact_output_distribution(
            &LocalSearch::new(&m, 1, eps, params).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        for nb in demand_neighbors(&m).unwrap() {
            let db = exact_output_distribution(
                &LocalSearch::new(&nb, 1, eps, params).unwrap(),
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(symmetric_log_ratio(&da, &db) <= eps + TOL);
        }
    }
}

#[test]
fn set_cover_empty_requirement_is_uniform() {
    let sys = SetSystem::new(2, vec![vec![0], vec![1], vec![0, 1]], None, vec![]).unwrap();
    let d = exact_output_distribution(&UnweightedSc::new(&sys, 1.0, 0.05).unwrap(), DEFAULT_BUDGET)
        .unwrap();
    assert_eq!(d.len(), 6);
    assert!(d.iter().all(|(_, p)| (p - 1.0 / 6.0).abs() < 1e-15));
    let g = Graph::new(3, []).unwrap();
    let d =
        exact_output_distribution(&UnweightedVc::new(&g, 1.0).unwrap(), DEFAULT_BUDGET).unwrap();
    assert_eq!(d.len(), 6);
}
