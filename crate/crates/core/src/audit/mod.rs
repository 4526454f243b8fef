//! Exact privacy verification on tiny instances.
//!
//! [`exact_output_distribution`] walks every branch of a
//! [`SequentialMechanism`] and sums the probabilities of all transcripts
//! that lead to the same public output. Comparing two such tables with
//! [`max_log_ratio`] or [`hockey_stick_delta`] gives the exact privacy loss
//! between two inputs.

pub mod adjacency;
pub mod coin;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::sequential::{log_probabilities, SequentialMechanism};

/// Default cap on the number of complete transcripts expanded.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Outcome to probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<K: Ord> {
    probs: BTreeMap<K, f64>,
}

impl<K: Ord> FiniteDistribution<K> {
    /// Table from explicit pairs; repeated outcomes are merged.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (K, f64)>) -> Self {
        let mut acc: BTreeMap<K, NeumaierSum> = BTreeMap::new();
        for (k, p) in pairs {
            acc.entry(k).or_default().add(p);
        }
        Self {
            probs: acc.into_iter().map(|(k, s)| (k, s.value())).collect(),
        }
    }

    pub fn prob(&self, outcome: &K) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.probs.iter().map(|(k, &p)| (k, p))
    }

    pub fn total(&self) -> f64 {
        let mut s = NeumaierSum::default();
        for &p in self.probs.values() {
            s.add(p);
        }
        s.value()
    }

    /// Pushes the distribution through `f`.
    pub fn map<J: Ord>(&self, mut f: impl FnMut(&K) -> J) -> FiniteDistribution<J> {
        FiniteDistribution::from_pairs(self.probs.iter().map(|(k, &p)| (f(k), p)))
    }
}

/// Exact distribution of the public output.
pub fn exact_output_distribution<M: SequentialMechanism>(
    mech: &M,
    budget: usize,
) -> Result<FiniteDistribution<M::Output>> {
    exact_distribution_by(mech, budget, |o| o.clone())
}

/// Exact distribution of `key(output)`.
pub fn exact_distribution_by<M, K, F>(
    mech: &M,
    budget: usize,
    key: F,
) -> Result<FiniteDistribution<K>>
where
    M: SequentialMechanism,
    K: Ord,
    F: Fn(&M::Output) -> K,
{
    let mut acc: BTreeMap<K, NeumaierSum> = BTreeMap::new();
    let mut leaves = 0usize;
    let mut stack = vec![(mech.start(), 0.0f64)];
    while let Some((state, logp)) = stack.pop() {
        let moves = mech.moves(&state);
        if moves.is_empty() {
            leaves += 1;
            if leaves > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            acc.entry(key(&mech.output(&state)))
                .or_default()
                .add(logp.exp());
            continue;
        }
        if moves.len() == 1 {
            let mut next = state;
            mech.advance(&mut next, 0);
            stack.push((next, logp));
            continue;
        }
        for (choice, lp) in log_probabilities(&moves).into_iter().enumerate() {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            let mut next = state.clone();
            mech.advance(&mut next, choice);
            stack.push((next, logp + lp));
        }
    }
    Ok(FiniteDistribution {
        probs: acc.into_iter().map(|(k, s)| (k, s.value())).collect(),
    })
}

/// `max_o ln(pA(o) / pB(o))`, infinite when `A` puts mass where `B` has none.
pub fn max_log_ratio<K: Ord>(a: &FiniteDistribution<K>, b: &FiniteDistribution<K>) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (k, pa) in a.iter() {
        if pa <= 0.0 {
            continue;
        }
        let pb = b.prob(k);
        let r = if pb <= 0.0 {
            f64::INFINITY
        } else {
            (pa / pb).ln()
        };
        worst = worst.max(r);
    }
    if worst == f64::NEG_INFINITY {
        0.0
    } else {
        worst
    }
}

/// Larger of the two directed log ratios.
pub fn symmetric_log_ratio<K: Ord>(a: &FiniteDistribution<K>, b: &FiniteDistribution<K>) -> f64 {
    max_log_ratio(a, b).max(max_log_ratio(b, a))
}

/// `Σ_o max(0, pA(o) - e^ε pB(o))`: the smallest `δ` for which `(ε, δ)`
/// holds on every event.
pub fn hockey_stick_delta<K: Ord>(
    a: &FiniteDistribution<K>,
    b: &FiniteDistribution<K>,
    epsilon: f64,
) -> f64 {
    let scale = epsilon.exp();
    let mut s = NeumaierSum::default();
    for (k, pa) in a.iter() {
        let excess = pa - scale * b.prob(k);
        if excess > 0.0 {
            s.add(excess);
        }
    }
    s.value().max(0.0)
}

/// Larger of the two directed hockey-stick divergences.
pub fn symmetric_hockey_stick<K: Ord>(
    a: &FiniteDistribution<K>,
    b: &FiniteDistribution<K>,
    epsilon: f64,
) -> f64 {
    hockey_stick_delta(a, b, epsilon).max(hockey_stick_delta(b, a, epsilon))
}

/// What an audit line checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuditBound {
    /// Worst log ratio at most this.
    Pure { epsilon: f64 },
    /// Hockey-stick divergence at `epsilon` at most `delta`.
    Approx { epsilon: f64, delta: f64 },
}

/// One line of an audit report.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub instance: String,
    pub pairs: usize,
    pub measured_epsilon: f64,
    pub measured_delta: Option<f64>,
    pub bound: AuditBound,
    pub tolerance: f64,
}

impl AuditRecord {
    pub fn passed(&self) -> bool {
        match self.bound {
            AuditBound::Pure { epsilon } => self.measured_epsilon <= epsilon + self.tolerance,
            AuditBound::Approx { delta, .. } => self
                .measured_delta
                .is_some_and(|d| d <= delta + self.tolerance),
        }
    }
}

impl fmt::Display for AuditRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "fail" };
        let delta = self
            .measured_delta
            .map_or("-".to_string(), |d| format!("{d:.6e}"));
        let bound = match self.bound {
            AuditBound::Pure { epsilon } => format!("eps<={epsilon}"),
            AuditBound::Approx { epsilon, delta } => format!("delta@{epsilon:.6}<={delta}"),
        };
        write!(
            f,
            "instance={} pairs={} eps_measured={:.9} delta_measured={} bound={} status={}",
            self.instance, self.pairs, self.measured_epsilon, delta, bound, status
        )
    }
}

/// Audits `(instance, neighbour)` pairs in both directions. `dist` maps an
/// input to its exact output distribution.
pub fn audit_pairs<I, K, D>(
    name: impl Into<String>,
    pairs: &[(I, I)],
    bound: AuditBound,
    tolerance: f64,
    dist: D,
) -> Result<AuditRecord>
where
    I: Sync,
    K: Ord + Send,
    D: Fn(&I) -> Result<FiniteDistribution<K>> + Sync,
{
    use rayon::prelude::*;
    let measured: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|(a, b)| {
            let (da, db) = (dist(a)?, dist(b)?);
            let eps = symmetric_log_ratio(&da, &db);
            let delta = match bound {
                AuditBound::Approx { epsilon, .. } => symmetric_hockey_stick(&da, &db, epsilon),
                AuditBound::Pure { .. } => 0.0,
            };
            Ok((eps, delta))
        })
        .collect::<Result<_>>()?;
    let measured_epsilon = measured.iter().map(|m| m.0).fold(0.0, f64::max);
    let measured_delta = match bound {
        AuditBound::Approx { .. } => Some(measured.iter().map(|m| m.1).fold(0.0, f64::max)),
        AuditBound::Pure { .. } => None,
    };
    Ok(AuditRecord {
        instance: name.into(),
        pairs: pairs.len(),
        measured_epsilon,
        measured_delta,
        bound,
        tolerance,
    })
}
