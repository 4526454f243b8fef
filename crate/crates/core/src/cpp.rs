//! Combinatorial public projects: choose `k` resources to maximize the sum
//! of the agents' coverage valuations, with the agents' valuations private.

use itertools::Itertools;

use crate::error::{invalid, require_positive, Error, Result};
use crate::instances::SubmodularInstance;
use crate::mech::exp_mechanism_index;
use crate::rng::RngStream;
use crate::sequential::{run_mechanism, SequentialMechanism};

/// Resources in the order they were chosen.
pub type ResourceSelection = Vec<usize>;

/// Largest `C(m, k)` for subset enumeration.
pub const MAX_SUBSETS: u128 = 1_000_000;

/// Value of agent `i` for a resource set: weighted fraction of its targets
/// covered (0 for an agent without targets).
pub fn agent_value(instance: &SubmodularInstance, agent: usize, resources: &[usize]) -> f64 {
    let a = &instance.agents()[agent];
    let total = a.total_weight();
    if total == 0.0 {
        return 0.0;
    }
    let covered = covered_mask(instance, resources);
    a.targets()
        .iter()
        .filter(|(e, _)| covered[*e])
        .map(|(_, w)| w)
        .sum::<f64>()
        / total
}

fn covered_mask(instance: &SubmodularInstance, resources: &[usize]) -> Vec<bool> {
    let mut covered = vec![false; instance.universe()];
    for &r in resources {
        for &e in &instance.resources()[r] {
            covered[e] = true;
        }
    }
    covered
}

/// `F(S) = Σ_i f_i(S)`, evaluated from scratch.
pub fn total_welfare(instance: &SubmodularInstance, resources: &[usize]) -> f64 {
    (0..instance.agents().len())
        .map(|i| agent_value(instance, i, resources))
        .sum()
}

/// Per-element value `Σ_i w_ie / W_i`; welfare is the sum over covered
/// elements, which makes marginal gains cheap to update.
fn element_values(instance: &SubmodularInstance) -> Vec<f64> {
    let mut val = vec![0.0; instance.universe()];
    for a in instance.agents() {
        let total = a.total_weight();
        for &(e, w) in a.targets() {
            val[e] += w / total;
        }
    }
    val
}

/// Incrementally maintained coverage state.
#[derive(Debug, Clone)]
pub struct CoverageCounter {
    covered: Vec<bool>,
    chosen: Vec<usize>,
    welfare: f64,
}

impl CoverageCounter {
    fn new(universe: usize) -> Self {
        Self {
            covered: vec![false; universe],
            chosen: Vec::new(),
            welfare: 0.0,
        }
    }

    fn gain(&self, instance: &SubmodularInstance, values: &[f64], r: usize) -> f64 {
        instance.resources()[r]
            .iter()
            .filter(|&&e| !self.covered[e])
            .map(|&e| values[e])
            .sum()
    }

    fn add(&mut self, instance: &SubmodularInstance, values: &[f64], r: usize) {
        self.welfare += self.gain(instance, values, r);
        for &e in &instance.resources()[r] {
            self.covered[e] = true;
        }
        self.chosen.push(r);
    }

    fn remaining(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|r| !self.chosen.contains(r)).collect()
    }

    pub fn welfare(&self) -> f64 {
        self.welfare
    }
}

fn check_k(instance: &SubmodularInstance, k: usize) -> Result<()> {
    if k > instance.num_resources() {
        return Err(invalid(
            "k",
            format!("k = {k} exceeds m = {}", instance.num_resources()),
        ));
    }
    Ok(())
}

/// Non-private greedy: `k` rounds of the largest marginal gain, ties to the
/// lowest index.
pub fn greedy_cpp(instance: &SubmodularInstance, k: usize) -> Result<ResourceSelection> {
    check_k(instance, k)?;
    let values = element_values(instance);
    let mut state = CoverageCounter::new(instance.universe());
    for _ in 0..k {
        let mut best = None;
        for r in state.remaining(instance.num_resources()) {
            let g = state.gain(instance, &values, r);
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((r, g));
            }
        }
        let (r, _) = best.expect("k <= m");
        state.add(instance, &values, r);
    }
    Ok(state.chosen)
}

/// Per-round parameter `epsilon / (e ln(e / delta))`.
pub fn cpp_epsilon_prime(epsilon: f64, delta: f64) -> Result<f64> {
    require_positive("epsilon", epsilon)?;
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(invalid(
            "delta",
            format!("must lie in (0, 1/2], got {delta}"),
        ));
    }
    Ok(epsilon / (std::f64::consts::E * (std::f64::consts::E / delta).ln()))
}

/// Privacy level `epsilon' (e - 1) ln(e / delta)` of the greedy mechanism.
pub fn cpp_privacy(epsilon_prime: f64, delta: f64) -> f64 {
    epsilon_prime * (std::f64::consts::E - 1.0) * (std::f64::consts::E / delta).ln()
}

/// Per-round parameter `epsilon / k` that makes `k` rounds pure
/// `epsilon`-DP.
pub fn per_round_epsilon_for_pure_dp(epsilon: f64, k: usize) -> Result<f64> {
    require_positive("epsilon", epsilon)?;
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    Ok(epsilon / k as f64)
}

/// Private greedy: `k` rounds, each drawing a remaining resource with
/// probability proportional to `exp(epsilon' * marginal gain)`.
pub struct CppGreedy<'a> {
    instance: &'a SubmodularInstance,
    values: Vec<f64>,
    k: usize,
    round_epsilon: f64,
}

impl<'a> CppGreedy<'a> {
    /// `(epsilon, delta)` version with `epsilon' = epsilon / (e ln(e/delta))`.
    pub fn new(
        instance: &'a SubmodularInstance,
        k: usize,
        epsilon: f64,
        delta: f64,
    ) -> Result<Self> {
        Self::with_round_epsilon(instance, k, cpp_epsilon_prime(epsilon, delta)?)
    }

    /// Pure version with `epsilon' = epsilon / k`.
    pub fn pure(instance: &'a SubmodularInstance, k: usize, epsilon: f64) -> Result<Self> {
        Self::with_round_epsilon(
            instance,
            k,
            per_round_epsilon_for_pure_dp(epsilon, k.max(1))?,
        )
    }

    pub fn with_round_epsilon(
        instance: &'a SubmodularInstance,
        k: usize,
        round_epsilon: f64,
    ) -> Result<Self> {
        check_k(instance, k)?;
        require_positive("round_epsilon", round_epsilon)?;
        Ok(Self {
            instance,
            values: element_values(instance),
            k,
            round_epsilon,
        })
    }

    pub fn round_epsilon(&self) -> f64 {
        self.round_epsilon
    }
}

impl SequentialMechanism for CppGreedy<'_> {
    type State = CoverageCounter;
    type Output = ResourceSelection;

    fn start(&self) -> CoverageCounter {
        CoverageCounter::new(self.instance.universe())
    }

    fn moves(&self, s: &CoverageCounter) -> Vec<f64> {
        if s.chosen.len() == self.k {
            return Vec::new();
        }
        s.remaining(self.instance.num_resources())
            .into_iter()
            .map(|r| self.round_epsilon * s.gain(self.instance, &self.values, r))
            .collect()
    }

    fn advance(&self, s: &mut CoverageCounter, choice: usize) {
        let r = s.remaining(self.instance.num_resources())[choice];
        s.add(self.instance, &self.values, r);
    }

    fn output(&self, s: &CoverageCounter) -> ResourceSelection {
        s.chosen.clone()
    }
}

pub fn private_cpp_greedy(
    instance: &SubmodularInstance,
    k: usize,
    epsilon: f64,
    delta: f64,
    rng: &mut RngStream,
) -> Result<ResourceSelection> {
    Ok(run_mechanism(
        &CppGreedy::new(instance, k, epsilon, delta)?,
        rng,
    ))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exponential mechanism over all `k`-subsets scored by welfare at
/// parameter `epsilon / 2` (one agent moves welfare by at most 1).
pub fn private_cpp_expmech(
    instance: &SubmodularInstance,
    k: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    check_k(instance, k)?;
    require_positive("epsilon", epsilon)?;
    let m = instance.num_resources();
    if binomial(m, k) > MAX_SUBSETS {
        return Err(Error::TooLarge {
            what: "k-subset enumeration",
            detail: format!("C({m}, {k}) > {MAX_SUBSETS}"),
        });
    }
    let subsets: Vec<Vec<usize>> = (0..m).combinations(k).collect();
    let scores: Vec<f64> = subsets.iter().map(|s| total_welfare(instance, s)).collect();
    let i = exp_mechanism_index(&scores, epsilon / 2.0, rng)?;
    Ok(subsets[i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::oracle::brute_cpp;
    use crate::instances::generate::gen_coverage_instance;
    use crate::sequential::normalize_log_weights;
    use proptest::prelude::*;

    fn two_by_two() -> SubmodularInstance {
        SubmodularInstance::new(
            2,
            vec![vec![0], vec![1]],
            vec![vec![(0, 1.0)], vec![(1, 1.0)]],
        )
        .unwrap()
    }

    #[test]
    fn welfare_examples() {
        let inst = two_by_two();
        assert_eq!(total_welfare(&inst, &[]), 0.0);
        assert_eq!(total_welfare(&inst, &[0]), 1.0);
        assert_eq!(total_welfare(&inst, &[0, 1]), 2.0);
        let with_empty =
            SubmodularInstance::new(2, vec![vec![0, 1]], vec![vec![(0, 2.0), (1, 1.0)], vec![]])
                .unwrap();
        assert_eq!(total_welfare(&with_empty, &[0]), 1.0);
    }

    #[test]
    fn greedy_examples() {
        let inst = two_by_two();
        let mut all = greedy_cpp(&inst, 2).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1]);
        let single = SubmodularInstance::new(
            3,
            vec![vec![0], vec![0, 1, 2], vec![1]],
            vec![vec![(0, 1.0), (1, 1.0), (2, 1.0)]],
        )
        .unwrap();
        assert_eq!(greedy_cpp(&single, 1).unwrap(), vec![1]);
        assert!(greedy_cpp(&single, 4).is_err());
    }

    #[test]
    fn greedy_beats_one_minus_inverse_e() {
        for seed in 0..100 {
            let mut rng = RngStream::new(seed, 0);
            let inst = gen_coverage_instance(15, 12, 6, 0.2, 0.4, &mut rng).unwrap();
            let (opt, _) = brute_cpp(&inst, 3).unwrap();
            let g = total_welfare(&inst, &greedy_cpp(&inst, 3).unwrap());
            assert!(g >= (1.0 - (-1.0f64).exp()) * opt - 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn first_pick_probability() {
        let inst = SubmodularInstance::new(1, vec![vec![0], vec![]], vec![vec![(0, 1.0)]]).unwrap();
        let mech = CppGreedy::new(&inst, 1, 1.0, 0.1).unwrap();
        let e = mech.round_epsilon();
        let p = normalize_log_weights(&mech.moves(&mech.start()));
        assert!((p[0] - e.exp() / (e.exp() + 1.0)).abs() < 1e-15);
        let zero = SubmodularInstance::new(1, vec![vec![0], vec![]], vec![vec![]]).unwrap();
        let mech = CppGreedy::new(&zero, 2, 1.0, 0.1).unwrap();
        assert_eq!(mech.moves(&mech.start()), vec![0.0, 0.0]);
    }

    #[test]
    fn parameters() {
        assert_eq!(per_round_epsilon_for_pure_dp(1.0, 1).unwrap(), 1.0);
        assert_eq!(per_round_epsilon_for_pure_dp(1.0, 4).unwrap(), 0.25);
        assert!(cpp_epsilon_prime(1.0, 0.6).is_err());
        let e = cpp_epsilon_prime(1.0, 0.1).unwrap();
        assert!(
            (cpp_privacy(e, 0.1) - (std::f64::consts::E - 1.0) / std::f64::consts::E).abs() < 1e-12
        );
    }

    #[test]
    fn expmech_full_set() {
        let inst = two_by_two();
        let mut rng = RngStream::new(1, 0);
        assert_eq!(
            private_cpp_expmech(&inst, 2, 1.0, &mut rng).unwrap(),
            vec![0, 1]
        );
    }

    proptest! {
        #[test]
        fn incremental_welfare_matches_scratch(seed in 0u64..5000, k in 0usize..6) {
            let mut rng = RngStream::new(seed, 1);
            let inst = gen_coverage_instance(10, 6, 4, 0.3, 0.5, &mut rng).unwrap();
            let mech = CppGreedy::new(&inst, k, 1.0, 0.1).unwrap();
            let end = crate::sequential::run_to_end(&mech, &mut rng);
            prop_assert!((end.welfare() - total_welfare(&inst, &end.chosen)).abs() < 1e-9);
        }

        #[test]
        fn values_monotone_and_submodular(seed in 0u64..5000) {
            let mut rng = RngStream::new(seed, 2);
            let inst = gen_coverage_instance(10, 7, 3, 0.3, 0.6, &mut rng).unwrap();
            let mut chain: Vec<usize> = (0..7).collect();
            rng.shuffle(&mut chain);
            let small = &chain[..2];
            let large = &chain[..5];
            let r = chain[6];
            for i in 0..inst.agents().len() {
                let fs = agent_value(&inst, i, small);
                let fl = agent_value(&inst, i, large);
                prop_assert!(fs <= fl + 1e-12);
                let gs = agent_value(&inst, i, &[small, &[r]].concat()) - fs;
                let gl = agent_value(&inst, i, &[large, &[r]].concat()) - fl;
                prop_assert!(gs >= gl - 1e-12);
            }
        }

        #[test]
        fn removing_an_agent_moves_gains_by_at_most_one(seed in 0u64..5000, who in 0usize..4) {
            let mut rng = RngStream::new(seed, 3);
            let inst = gen_coverage_instance(8, 5, 4, 0.3, 0.6, &mut rng).unwrap();
            let fewer = inst.without_agent(who);
            let a = CppGreedy::new(&inst, 3, 1.0, 0.1).unwrap();
            let b = CppGreedy::new(&fewer, 3, 1.0, 0.1).unwrap();
            let mut sa = a.start();
            let mut sb = b.start();
            for round in 0..3 {
                let ga: Vec<f64> = sa.remaining(5).iter().map(|&r| sa.gain(&inst, &a.values, r)).collect();
                let gb: Vec<f64> = sb.remaining(5).iter().map(|&r| sb.gain(&fewer, &b.values, r)).collect();
                for (x, y) in ga.iter().zip(&gb) {
                    prop_assert!((x - y).abs() <= 1.0 + 1e-12 && x >= &(y - 1e-12));
                }
                a.advance(&mut sa, round % ga.len());
                b.advance(&mut sb, round % gb.len());
            }
        }
    }
}
