//! Private k-median: local search driven by the exponential mechanism, and
//! the exponential mechanism over all k-subsets.

use itertools::Itertools;

use crate::error::{invalid, require_positive, Error, Result};
use crate::instances::MetricInstance;
use crate::mech::exp_mechanism_index;
use crate::rng::RngStream;
use crate::sequential::{run_mechanism, SequentialMechanism};

/// A set of `k` distinct medians, kept sorted.
pub type MedianSet = Vec<usize>;

/// Largest `C(n, k)` for subset enumeration.
pub const MAX_SUBSETS: u128 = 1_000_000;

/// Sum over demands of the distance to the nearest median.
pub fn kmedian_cost(metric: &MetricInstance, medians: &[usize]) -> f64 {
    debug_assert!(!medians.is_empty());
    metric
        .demands()
        .iter()
        .map(|&v| {
            let row = metric.row(v);
            medians
                .iter()
                .map(|&f| row[f])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Rounds of local search, `ceil(6 k ln n)`.
pub fn local_search_rounds(n: usize, k: usize) -> usize {
    (6.0 * k as f64 * (n as f64).ln()).ceil() as usize
}

fn swapped(medians: &[usize], out: usize, inn: usize) -> MedianSet {
    let mut f: Vec<usize> = medians.iter().copied().filter(|&x| x != out).collect();
    f.push(inn);
    f.sort_unstable();
    f
}

/// All single swaps `(x, y)` with `x` in `medians` and `y` outside, in
/// lexicographic order.
pub fn swap_pairs(n: usize, medians: &[usize]) -> Vec<(usize, usize)> {
    let mut inside = vec![false; n];
    for &f in medians {
        inside[f] = true;
    }
    medians
        .iter()
        .flat_map(|&x| (0..n).filter(|&y| !inside[y]).map(move |y| (x, y)))
        .collect()
}

/// Largest single-swap improvement `cost(F) - cost(F - x + y)`.
pub fn arya_swap_gap(metric: &MetricInstance, medians: &[usize]) -> f64 {
    let base = kmedian_cost(metric, medians);
    swap_pairs(metric.n(), medians)
        .into_iter()
        .map(|(x, y)| base - kmedian_cost(metric, &swapped(medians, x, y)))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LocalSearchParams {
    /// Number of swap rounds `T`; `None` means [`local_search_rounds`].
    pub rounds: Option<usize>,
}

/// Local search as a sequence of exponential-mechanism choices: `T` swap
/// rounds from the first `k` points, then a pick among `F_1..F_T`, all at
/// `epsilon' = epsilon / (2 Δ (T + 1))` with score `-cost`.
pub struct LocalSearch<'a> {
    metric: &'a MetricInstance,
    k: usize,
    rounds: usize,
    epsilon_prime: f64,
}

impl<'a> LocalSearch<'a> {
    pub fn new(
        metric: &'a MetricInstance,
        k: usize,
        epsilon: f64,
        params: LocalSearchParams,
    ) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        let n = metric.n();
        if k == 0 || k >= n {
            return Err(invalid("k", format!("need 1 <= k < n = {n}, got {k}")));
        }
        let rounds = params.rounds.unwrap_or_else(|| local_search_rounds(n, k));
        if rounds == 0 {
            return Err(invalid("rounds", "need at least one round"));
        }
        let diameter = metric.diameter();
        Ok(Self {
            metric,
            k,
            rounds,
            epsilon_prime: epsilon / (2.0 * diameter * (rounds + 1) as f64),
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn epsilon_prime(&self) -> f64 {
        self.epsilon_prime
    }
}

/// Visited solutions so far and, once made, the final pick.
#[derive(Debug, Clone)]
pub struct LocalSearchState {
    visited: Vec<MedianSet>,
    pick: Option<usize>,
}

impl SequentialMechanism for LocalSearch<'_> {
    type State = LocalSearchState;
    /// The visited solutions `F_1..F_{T+1}` and the index of the returned one.
    type Output = (Vec<MedianSet>, usize);

    fn start(&self) -> LocalSearchState {
        LocalSearchState {
            visited: vec![(0..self.k).collect()],
            pick: None,
        }
    }

    fn moves(&self, s: &LocalSearchState) -> Vec<f64> {
        if s.pick.is_some() {
            return Vec::new();
        }
        let e = self.epsilon_prime;
        if s.visited.len() <= self.rounds {
            let f = s.visited.last().expect("nonempty");
            swap_pairs(self.metric.n(), f)
                .into_iter()
                .map(|(x, y)| -e * kmedian_cost(self.metric, &swapped(f, x, y)))
                .collect()
        } else {
            s.visited[..self.rounds]
                .iter()
                .map(|f| -e * kmedian_cost(self.metric, f))
                .collect()
        }
    }

    fn advance(&self, s: &mut LocalSearchState, choice: usize) {
        if s.visited.len() <= self.rounds {
            let f = s.visited.last().expect("nonempty");
            let (x, y) = swap_pairs(self.metric.n(), f)[choice];
            let next = swapped(f, x, y);
            s.visited.push(next);
        } else {
            s.pick = Some(choice);
        }
    }

    fn output(&self, s: &LocalSearchState) -> (Vec<MedianSet>, usize) {
        (s.visited.clone(), s.pick.expect("finished"))
    }
}

pub fn private_kmedian_localsearch(
    metric: &MetricInstance,
    k: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<MedianSet> {
    let mech = LocalSearch::new(metric, k, epsilon, LocalSearchParams::default())?;
    let (visited, j) = run_mechanism(&mech, rng);
    Ok(visited[j].clone())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exponential mechanism over every `k`-subset with score `-cost` at
/// parameter `epsilon / (2 Δ)`.
pub fn private_kmedian_expmech(
    metric: &MetricInstance,
    k: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<MedianSet> {
    require_positive("epsilon", epsilon)?;
    let n = metric.n();
    if k == 0 || k > n {
        return Err(invalid("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    if binomial(n, k) > MAX_SUBSETS {
        return Err(Error::TooLarge {
            what: "k-subset enumeration",
            detail: format!("C({n}, {k}) > {MAX_SUBSETS}"),
        });
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let scores: Vec<f64> = subsets.iter().map(|f| -kmedian_cost(metric, f)).collect();
    let diameter = metric.diameter().max(1.0);
    let i = exp_mechanism_index(&scores, epsilon / (2.0 * diameter), rng)?;
    Ok(subsets[i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::oracle::brute_kmedian;
    use crate::instances::generate::{gen_line_metric, gen_random_metric, gen_uniform_metric};
    use proptest::prelude::*;

    #[test]
    fn cost_examples() {
        let line = gen_line_metric(4).unwrap();
        assert_eq!(kmedian_cost(&line, &[1]), 4.0);
        assert_eq!(kmedian_cost(&line, &[0, 1, 2, 3]), 0.0);
        let u = gen_uniform_metric(6, 3.0).unwrap();
        assert_eq!(kmedian_cost(&u, &[0, 4]), 12.0);
        assert_eq!(kmedian_cost(&u, &[2]), 15.0);
    }

    #[test]
    fn rounds_and_parameters() {
        assert_eq!(local_search_rounds(15, 2), 33);
        let m = gen_uniform_metric(5, 2.0).unwrap();
        let ls = LocalSearch::new(&m, 2, 1.0, LocalSearchParams::default()).unwrap();
        assert_eq!(ls.rounds(), 20);
        assert!((ls.epsilon_prime() - 1.0 / (2.0 * 2.0 * 21.0)).abs() < 1e-15);
        assert!(LocalSearch::new(&m, 5, 1.0, LocalSearchParams::default()).is_err());
    }

    #[test]
    fn zero_cost_swap_is_most_likely() {
        let m = gen_line_metric(3).unwrap().with_demands(vec![2]).unwrap();
        let ls = LocalSearch::new(&m, 1, 1.0, LocalSearchParams { rounds: Some(2) }).unwrap();
        let lw = ls.moves(&ls.start());
        let pairs = swap_pairs(3, &[0]);
        let best = lw
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(pairs[best], (0, 2));
    }

    #[test]
    fn visited_sets_have_size_k() {
        let mut rng = RngStream::new(3, 3);
        let m = gen_random_metric(9, 5, &mut rng).unwrap();
        let ls = LocalSearch::new(&m, 3, 1.0, LocalSearchParams::default()).unwrap();
        let (visited, j) = run_mechanism(&ls, &mut rng);
        assert_eq!(visited.len(), ls.rounds() + 1);
        assert!(j < ls.rounds());
        assert_eq!(visited[0], vec![0, 1, 2]);
        for f in &visited {
            assert_eq!(f.len(), 3);
            assert!(f.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn expmech_edge_cases() {
        let m = gen_uniform_metric(4, 1.0).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert_eq!(
            private_kmedian_expmech(&m, 4, 1.0, &mut rng).unwrap(),
            vec![0, 1, 2, 3]
        );
        let empty = m.with_demands(vec![]).unwrap();
        let mut counts = [0usize; 6];
        let subsets: Vec<Vec<usize>> = (0..4).combinations(2).collect();
        for _ in 0..6000 {
            let f = private_kmedian_expmech(&empty, 2, 1.0, &mut rng).unwrap();
            counts[subsets.iter().position(|s| *s == f).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 - 1000.0).abs() < 150.0));
    }

    #[test]
    fn expmech_mean_within_additive_bound() {
        // n = 8, k = 2, uniform metric: mean <= OPT + 8 k Δ ln n / eps
        let m = gen_uniform_metric(8, 1.0).unwrap();
        let (opt, _) = brute_kmedian(&m, 2).unwrap();
        let mut rng = RngStream::new(5, 0);
        let trials = 1000;
        let mean = (0..trials)
            .map(|_| kmedian_cost(&m, &private_kmedian_expmech(&m, 2, 1.0, &mut rng).unwrap()))
            .sum::<f64>()
            / trials as f64;
        assert!(mean <= opt + 8.0 * 2.0 * 8f64.ln());
    }

    #[test]
    fn arya_gap_examples() {
        // uniform metric, demands all points: any swap keeps the cost
        let u = gen_uniform_metric(5, 2.0).unwrap();
        assert_eq!(arya_swap_gap(&u, &[0]), 0.0);
        // two clusters on a line, both medians in the left one
        let line = gen_line_metric(6).unwrap();
        assert!(arya_swap_gap(&line, &[0, 1]) > 0.0);
    }

    #[test]
    fn arya_gap_bound_on_random_metrics() {
        for seed in 0..100 {
            let mut rng = RngStream::new(seed, 9);
            let m = gen_random_metric(10, 8, &mut rng).unwrap();
            let (opt, _) = brute_kmedian(&m, 2).unwrap();
            let f = vec![rng.below(5), 5 + rng.below(5)];
            let cost = kmedian_cost(&m, &f);
            assert!(
                arya_swap_gap(&m, &f) >= (cost - 5.0 * opt) / 2.0 - 1e-9,
                "seed {seed}"
            );
        }
    }

    proptest! {
        #[test]
        fn cost_monotone_under_adding_medians(seed in 0u64..5000, extra in 0usize..8) {
            let mut rng = RngStream::new(seed, 0);
            let m = gen_random_metric(8, 6, &mut rng).unwrap();
            let f = vec![rng.below(8)];
            let mut g = f.clone();
            if !g.contains(&extra) {
                g.push(extra);
            }
            prop_assert!(kmedian_cost(&m, &g) <= kmedian_cost(&m, &f));
        }

        #[test]
        fn swap_scores_move_by_at_most_diameter(seed in 0u64..5000, point in 0usize..7) {
            let mut rng = RngStream::new(seed, 1);
            let m = gen_random_metric(7, 5, &mut rng).unwrap();
            let fewer: Vec<usize> = m.demands().iter().copied().filter(|&d| d != point).collect();
            let m2 = m.with_demands(fewer).unwrap();
            let f = vec![0, 1];
            for (x, y) in swap_pairs(7, &f) {
                let g = swapped(&f, x, y);
                prop_assert!((kmedian_cost(&m, &g) - kmedian_cost(&m2, &g)).abs() <= m.diameter());
            }
        }
    }
}
