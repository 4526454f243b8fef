//! The two primitive mechanisms everything else is built from: the
//! exponential mechanism over a finite candidate list and Laplace noise.

use crate::error::{invalid, require_positive, Error, Result};
use crate::instances::Graph;
use crate::matching::maximum_matching;
use crate::rng::RngStream;

/// An `(epsilon, delta)` privacy level. `delta == 0` is pure ε-DP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        if !(0.0..1.0).contains(&delta) {
            return Err(invalid("delta", format!("must lie in [0, 1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_pure(&self) -> bool {
        self.delta == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate<T> {
    pub outcome: T,
    pub score: f64,
}

impl<T> ScoredCandidate<T> {
    pub fn new(outcome: T, score: f64) -> Self {
        Self { outcome, score }
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    // zero is allowed: it is the uniform distribution
    if epsilon.is_finite() && epsilon >= 0.0 {
        Ok(())
    } else {
        Err(invalid(
            "epsilon",
            format!("must be finite and non-negative, got {epsilon}"),
        ))
    }
}

/// Selection probabilities `exp(eps * s_i) / sum_j exp(eps * s_j)`, computed
/// after subtracting the maximum score.
pub fn exp_mechanism_probabilities(scores: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    check_epsilon(epsilon)?;
    if let Some((index, &score)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
        return Err(Error::NonFiniteScore { index, score });
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = scores.iter().map(|s| (epsilon * (s - max)).exp()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Draws an index with probability proportional to `weights` (non-negative,
/// not all zero). Consumes exactly one uniform draw.
pub fn sample_weighted(weights: &[f64], rng: &mut RngStream) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    // rounding left `target` at or past the accumulated total
    last_positive
}

/// Index-level exponential mechanism.
pub fn exp_mechanism_index(scores: &[f64], epsilon: f64, rng: &mut RngStream) -> Result<usize> {
    let probs = exp_mechanism_probabilities(scores, epsilon)?;
    Ok(sample_weighted(&probs, rng))
}

/// Exponential mechanism: returns candidate `r` with probability
/// proportional to `exp(epsilon * score(r))`.
///
/// `sensitivity` is the caller's bound on how much any score moves between
/// adjacent inputs; it is not checked against the data. The selection is
/// `2 * epsilon * sensitivity`-differentially private (see
/// [`exp_mechanism_privacy`]).
pub fn exp_mechanism<'a, T>(
    candidates: &'a [ScoredCandidate<T>],
    epsilon: f64,
    sensitivity: f64,
    rng: &mut RngStream,
) -> Result<&'a T> {
    require_positive("sensitivity", sensitivity)?;
    let scores: Vec<f64> = candidates.iter().map(|c| c.score).collect();
    let idx = exp_mechanism_index(&scores, epsilon, rng)?;
    Ok(&candidates[idx].outcome)
}

/// Privacy level of one exponential-mechanism selection.
pub fn exp_mechanism_privacy(epsilon: f64, sensitivity: f64) -> f64 {
    2.0 * epsilon * sensitivity
}

/// Upper bound `exp(-t)` on the probability that the exponential mechanism
/// returns a score below `max - ln(|R|/|R_opt|)/eps - t/eps`.
pub fn exp_mechanism_tail_bound(
    num_candidates: usize,
    num_optimal: usize,
    epsilon: f64,
    t: f64,
) -> Result<f64> {
    if num_optimal == 0 {
        return Err(invalid(
            "num_optimal",
            "at least one candidate attains the maximum",
        ));
    }
    if num_optimal > num_candidates {
        return Err(invalid("num_optimal", "cannot exceed num_candidates"));
    }
    require_positive("epsilon", epsilon)?;
    if t.is_nan() || t < 0.0 {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    Ok((-t).exp())
}

/// Score threshold below which [`exp_mechanism_tail_bound`] applies.
pub fn exp_mechanism_tail_threshold(
    max_score: f64,
    num_candidates: usize,
    num_optimal: usize,
    epsilon: f64,
    t: f64,
) -> f64 {
    max_score - (num_candidates as f64 / num_optimal as f64).ln() / epsilon - t / epsilon
}

/// One draw from the Laplace distribution with scale `scale`, by inverting
/// the CDF.
pub fn laplace_noise(scale: f64, rng: &mut RngStream) -> Result<f64> {
    require_positive("scale", scale)?;
    Ok(laplace_unchecked(scale, rng))
}

pub(crate) fn laplace_unchecked(scale: f64, rng: &mut RngStream) -> f64 {
    // u in (-1/2, 1/2]; 1 - 2|u| in [0, 1) ... avoid ln(0) by reflecting
    let u = rng.uniform() - 0.5;
    let magnitude = -scale * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln();
    if u < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Laplace CDF, used by tests and the audit module.
pub fn laplace_cdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

/// Private estimate of the vertex cover size: twice a maximum matching plus
/// `Lap(2/epsilon)`. The matching term is within a factor two of the optimal
/// cover, and one edge changes it by at most 2.
pub fn private_vc_size_estimate(graph: &Graph, epsilon: f64, rng: &mut RngStream) -> Result<f64> {
    require_positive("epsilon", epsilon)?;
    let matched = maximum_matching(graph).len() as f64;
    Ok(2.0 * matched + laplace_unchecked(2.0 / epsilon, rng))
}
