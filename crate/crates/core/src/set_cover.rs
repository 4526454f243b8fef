//! Private set cover. Mechanisms output an ordering of all sets; each
//! element is then covered by the first set in the ordering containing it.

use itertools::Itertools;

use crate::error::{invalid, require_positive, Error, Result};
use crate::instances::SetSystem;
use crate::mech::exp_mechanism_index;
use crate::rng::RngStream;
use crate::sequential::{run_mechanism, run_to_end, SequentialMechanism};

/// An ordering of all set indices, each exactly once.
pub type SetPermutation = Vec<usize>;

/// Largest `m` for the permutation-level exponential mechanism.
pub const MAX_PERMUTATION_SETS: usize = 8;

/// Picks, for every element to cover, the first set in `perm` containing it.
/// Returns the sorted chosen sets and their total cost (the count when the
/// system has no costs).
pub fn decode_set_cover(system: &SetSystem, perm: &[usize]) -> Result<(Vec<usize>, f64)> {
    let m = system.num_sets();
    if perm.len() != m {
        return Err(invalid(
            "permutation",
            format!("expected {m} sets, got {}", perm.len()),
        ));
    }
    let mut seen = vec![false; m];
    for &s in perm {
        if s >= m || seen[s] {
            return Err(invalid(
                "permutation",
                format!("set {s} out of range or repeated"),
            ));
        }
        seen[s] = true;
    }
    let mut uncovered = vec![false; system.universe()];
    let mut left = system.cover().len();
    for &e in system.cover() {
        uncovered[e] = true;
    }
    let mut chosen = Vec::new();
    for &s in perm {
        if left == 0 {
            break;
        }
        let mut used = false;
        for &e in &system.sets()[s] {
            if uncovered[e] {
                uncovered[e] = false;
                left -= 1;
                used = true;
            }
        }
        if used {
            chosen.push(s);
        }
    }
    chosen.sort_unstable();
    let cost = chosen.iter().map(|&s| system.cost(s)).sum();
    Ok((chosen, cost))
}

/// Per-round parameter `epsilon / (2 ln(e / delta))`.
pub fn set_cover_epsilon_prime(epsilon: f64, delta: f64) -> Result<f64> {
    require_positive("epsilon", epsilon)?;
    if !(delta > 0.0 && delta < (-1.0f64).exp()) {
        return Err(invalid(
            "delta",
            format!("must lie in (0, 1/e), got {delta}"),
        ));
    }
    Ok(epsilon / (2.0 * (std::f64::consts::E / delta).ln()))
}

#[derive(Debug, Clone)]
pub struct ScState {
    uncovered: Vec<bool>,
    remaining: Vec<usize>,
    order: Vec<usize>,
}

impl ScState {
    fn new(system: &SetSystem) -> Self {
        let mut uncovered = vec![false; system.universe()];
        for &e in system.cover() {
            uncovered[e] = true;
        }
        Self {
            uncovered,
            remaining: (0..system.num_sets()).collect(),
            order: Vec::with_capacity(system.num_sets()),
        }
    }

    fn gain(&self, system: &SetSystem, s: usize) -> usize {
        system.sets()[s]
            .iter()
            .filter(|&&e| self.uncovered[e])
            .count()
    }

    fn take(&mut self, system: &SetSystem, index: usize) -> usize {
        let s = self.remaining.remove(index);
        for &e in &system.sets()[s] {
            self.uncovered[e] = false;
        }
        self.order.push(s);
        s
    }
}

/// Unweighted private set cover: `m` rounds, each drawing a remaining set
/// with probability proportional to `exp(epsilon' * |S ∩ R_i|)`.
pub struct UnweightedSc<'a> {
    system: &'a SetSystem,
    epsilon_prime: f64,
}

impl<'a> UnweightedSc<'a> {
    pub fn new(system: &'a SetSystem, epsilon: f64, delta: f64) -> Result<Self> {
        Ok(Self {
            system,
            epsilon_prime: set_cover_epsilon_prime(epsilon, delta)?,
        })
    }

    pub fn epsilon_prime(&self) -> f64 {
        self.epsilon_prime
    }
}

impl SequentialMechanism for UnweightedSc<'_> {
    type State = ScState;
    type Output = SetPermutation;

    fn start(&self) -> ScState {
        ScState::new(self.system)
    }

    fn moves(&self, s: &ScState) -> Vec<f64> {
        s.remaining
            .iter()
            .map(|&i| self.epsilon_prime * s.gain(self.system, i) as f64)
            .collect()
    }

    fn advance(&self, s: &mut ScState, choice: usize) {
        s.take(self.system, choice);
    }

    fn output(&self, s: &ScState) -> SetPermutation {
        s.order.clone()
    }
}

pub fn private_set_cover_unweighted(
    system: &SetSystem,
    epsilon: f64,
    delta: f64,
    rng: &mut RngStream,
) -> Result<SetPermutation> {
    Ok(run_mechanism(
        &UnweightedSc::new(system, epsilon, delta)?,
        rng,
    ))
}

/// Halve-score threshold `ceil((3 ln m + ln ln max(3, nW) + 3) / epsilon')`.
pub fn wsc_constant_t(m: usize, n: usize, w: f64, epsilon_prime: f64) -> u64 {
    let m = m.max(1) as f64;
    let nw = (n as f64 * w).max(3.0);
    ((3.0 * m.ln() + nw.ln().ln() + 3.0) / epsilon_prime).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WscEvent {
    Set(usize),
    Halve,
}

/// One round of the threshold loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WscRound {
    pub r: f64,
    pub uncovered: usize,
    pub event: WscEvent,
    /// `|S ∩ R_i| - r_i C(S)` of the emitted set, or `-T` for a halve.
    pub score: f64,
}

/// The halve threshold and the per-round trace of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct HalveSchedule {
    pub t: u64,
    pub rounds: Vec<WscRound>,
}

#[derive(Debug, Clone)]
pub struct WscState {
    base: ScState,
    r: f64,
    rounds: Vec<WscRound>,
    events: Vec<WscEvent>,
}

/// Weighted private set cover. While `r >= 1/W`, each round draws either a
/// remaining set with weight `exp(epsilon' (|S ∩ R_i| - r C(S)))` or
/// `halve` with weight `exp(-epsilon' T)`; afterwards the remaining sets
/// follow in uniformly random order. Costs are normalized to minimum 1.
pub struct WeightedSc {
    system: SetSystem,
    divisor: f64,
    epsilon_prime: f64,
    t: u64,
    max_cost: f64,
}

impl WeightedSc {
    pub fn new(system: &SetSystem, epsilon: f64, delta: f64) -> Result<Self> {
        if system.costs().is_none() {
            return Err(invalid("costs", "weighted set cover needs per-set costs"));
        }
        let epsilon_prime = set_cover_epsilon_prime(epsilon, delta)?;
        let (system, divisor) = system.normalized_costs();
        let max_cost = system.costs().unwrap().iter().copied().fold(1.0, f64::max);
        let t = wsc_constant_t(
            system.num_sets(),
            system.universe(),
            max_cost,
            epsilon_prime,
        );
        Ok(Self {
            system,
            divisor,
            epsilon_prime,
            t,
            max_cost,
        })
    }

    /// The cost-normalized system the mechanism runs on.
    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    /// Divisor applied to the original costs.
    pub fn divisor(&self) -> f64 {
        self.divisor
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn epsilon_prime(&self) -> f64 {
        self.epsilon_prime
    }

    fn looping(&self, s: &WscState) -> bool {
        s.r >= 1.0 / self.max_cost
    }

    fn score(&self, s: &WscState, set: usize) -> f64 {
        s.base.gain(&self.system, set) as f64 - s.r * self.system.cost(set)
    }
}

impl SequentialMechanism for WeightedSc {
    type State = WscState;
    type Output = Vec<WscEvent>;

    fn start(&self) -> WscState {
        WscState {
            base: ScState::new(&self.system),
            r: self.system.universe() as f64,
            rounds: Vec::new(),
            events: Vec::new(),
        }
    }

    fn moves(&self, s: &WscState) -> Vec<f64> {
        if s.base.remaining.is_empty() {
            return Vec::new();
        }
        if self.looping(s) {
            let mut w: Vec<f64> = s
                .base
                .remaining
                .iter()
                .map(|&i| self.epsilon_prime * self.score(s, i))
                .collect();
            w.push(-self.epsilon_prime * self.t as f64);
            w
        } else {
            vec![0.0; s.base.remaining.len()]
        }
    }

    fn advance(&self, s: &mut WscState, choice: usize) {
        if !self.looping(s) {
            let set = s.base.take(&self.system, choice);
            s.events.push(WscEvent::Set(set));
            return;
        }
        let uncovered = s.base.uncovered.iter().filter(|&&u| u).count();
        if choice == s.base.remaining.len() {
            s.rounds.push(WscRound {
                r: s.r,
                uncovered,
                event: WscEvent::Halve,
                score: -(self.t as f64),
            });
            s.events.push(WscEvent::Halve);
            s.r /= 2.0;
        } else {
            let score = self.score(s, s.base.remaining[choice]);
            let set = s.base.take(&self.system, choice);
            s.rounds.push(WscRound {
                r: s.r,
                uncovered,
                event: WscEvent::Set(set),
                score,
            });
            s.events.push(WscEvent::Set(set));
        }
    }

    fn output(&self, s: &WscState) -> Vec<WscEvent> {
        s.events.clone()
    }
}

/// Drops halve events from a weighted transcript.
pub fn permutation_of(events: &[WscEvent]) -> SetPermutation {
    events
        .iter()
        .filter_map(|e| match e {
            WscEvent::Set(s) => Some(*s),
            WscEvent::Halve => None,
        })
        .collect()
}

pub fn private_set_cover_weighted(
    system: &SetSystem,
    epsilon: f64,
    delta: f64,
    rng: &mut RngStream,
) -> Result<SetPermutation> {
    let mech = WeightedSc::new(system, epsilon, delta)?;
    Ok(permutation_of(&run_mechanism(&mech, rng)))
}

/// Weighted private set cover that also returns the threshold trace.
pub fn private_set_cover_weighted_traced(
    system: &SetSystem,
    epsilon: f64,
    delta: f64,
    rng: &mut RngStream,
) -> Result<(SetPermutation, HalveSchedule)> {
    let mech = WeightedSc::new(system, epsilon, delta)?;
    let end = run_to_end(&mech, rng);
    Ok((
        permutation_of(&end.events),
        HalveSchedule {
            t: mech.t,
            rounds: end.rounds,
        },
    ))
}

/// A piece of the cost-scale decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SubInstance {
    /// Cost scale `j`: the elements are those whose cheapest set costs in
    /// `[b^j, b^(j+1))`, `b = max(n, 2)`.
    pub scale: i64,
    pub system: SetSystem,
    /// Original index of each set in `system`.
    pub set_indices: Vec<usize>,
}

/// Splits a weighted system into sub-instances whose cost ratio is below
/// `n^2`. Sets are bucketed by cost scale; elements by the scale of their
/// cheapest set. The sub-instance of element scale `j` keeps the sets of
/// scales `j` and `j + 1`, trimmed to those elements. The result is split
/// by the parity of `j`; within each list the sub-instances share no
/// elements and no sets. Depends only on the sets and costs, never on
/// which elements need covering (those are carried along unchanged).
pub fn remove_weight_dependence(
    system: &SetSystem,
) -> Result<(Vec<SubInstance>, Vec<SubInstance>)> {
    let costs = system
        .costs()
        .ok_or_else(|| invalid("costs", "weight removal needs per-set costs"))?;
    let base = system.universe().max(2) as f64;
    let scale_of = |c: f64| {
        let mut j = (c.ln() / base.ln()).floor() as i64;
        // guard the floor against rounding at exact powers
        while base.powi(j as i32) > c {
            j -= 1;
        }
        while base.powi(j as i32 + 1) <= c {
            j += 1;
        }
        j
    };
    let set_scale: Vec<i64> = costs.iter().map(|&c| scale_of(c)).collect();
    let mut element_scale = vec![None; system.universe()];
    for (s, set) in system.sets().iter().enumerate() {
        for &e in set {
            let better = match element_scale[e] {
                None => true,
                Some((c, _)) => costs[s] < c,
            };
            if better {
                element_scale[e] = Some((costs[s], set_scale[s]));
            }
        }
    }
    let mut scales: Vec<i64> = element_scale.iter().flatten().map(|&(_, j)| j).collect();
    scales.sort_unstable();
    scales.dedup();
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for j in scales {
        let members: Vec<bool> = element_scale
            .iter()
            .map(|x| matches!(x, Some((_, k)) if *k == j))
            .collect();
        let mut sets = Vec::new();
        let mut sub_costs = Vec::new();
        let mut indices = Vec::new();
        for (s, set) in system.sets().iter().enumerate() {
            if set_scale[s] != j && set_scale[s] != j + 1 {
                continue;
            }
            let trimmed: Vec<usize> = set.iter().copied().filter(|&e| members[e]).collect();
            if !trimmed.is_empty() {
                sets.push(trimmed);
                sub_costs.push(costs[s]);
                indices.push(s);
            }
        }
        let cover: Vec<usize> = system
            .cover()
            .iter()
            .copied()
            .filter(|&e| members[e])
            .collect();
        let sub = SubInstance {
            scale: j,
            system: SetSystem::new(system.universe(), sets, Some(sub_costs), cover)?,
            set_indices: indices,
        };
        if j.rem_euclid(2) == 0 {
            even.push(sub);
        } else {
            odd.push(sub);
        }
    }
    Ok((even, odd))
}

/// Runs the weighted mechanism on every piece of
/// [`remove_weight_dependence`] and returns the union of the decoded covers
/// (original set indices) with its total cost. Each element lies in exactly
/// one piece.
pub fn private_set_cover_scaled(
    system: &SetSystem,
    epsilon: f64,
    delta: f64,
    rng: &mut RngStream,
) -> Result<(Vec<usize>, f64)> {
    let (even, odd) = remove_weight_dependence(system)?;
    let mut chosen = Vec::new();
    for (k, sub) in even.iter().chain(odd.iter()).enumerate() {
        let mut child = rng.child(k as u64);
        let perm = private_set_cover_weighted(&sub.system, epsilon, delta, &mut child)?;
        let (local, _) = decode_set_cover(&sub.system, &perm)?;
        chosen.extend(local.into_iter().map(|i| sub.set_indices[i]));
    }
    chosen.sort_unstable();
    chosen.dedup();
    let cost = chosen.iter().map(|&s| system.cost(s)).sum();
    Ok((chosen, cost))
}

/// Exponential mechanism over all `m!` set orderings, scored by minus the
/// decoded cover size at parameter `epsilon / 2` (the size moves by at most
/// one between adjacent inputs).
pub fn private_set_cover_expmech(
    system: &SetSystem,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<SetPermutation> {
    require_positive("epsilon", epsilon)?;
    let m = system.num_sets();
    if m > MAX_PERMUTATION_SETS {
        return Err(Error::TooLarge {
            what: "permutation exponential mechanism",
            detail: format!("m = {m} > {MAX_PERMUTATION_SETS}"),
        });
    }
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    let scores = perms
        .iter()
        .map(|p| decode_set_cover(system, p).map(|(c, _)| -(c.len() as f64)))
        .collect::<Result<Vec<f64>>>()?;
    let k = exp_mechanism_index(&scores, epsilon / 2.0, rng)?;
    Ok(perms[k].clone())
}
