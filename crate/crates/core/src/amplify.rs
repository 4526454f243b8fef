//! Boosting the success probability of a private mechanism: best-of-T
//! repetition, and private amplification with dummy outcomes.

use crate::error::{invalid, require_positive, Error, Result};
use crate::mech::exp_mechanism_index;
use crate::rng::RngStream;

/// A randomized mechanism together with a quality score.
pub trait AmplifiableMechanism {
    type Input: ?Sized;
    type Outcome: Clone;

    fn sample(&self, input: &Self::Input, rng: &mut RngStream) -> Self::Outcome;

    fn score(&self, input: &Self::Input, outcome: &Self::Outcome) -> f64;

    /// Sensitivity of [`score`](Self::score) in the input.
    fn sensitivity(&self) -> f64 {
        1.0
    }
}

/// Adapter building an [`AmplifiableMechanism`] from two closures.
pub struct FnMechanism<I: ?Sized, O, S, Q>
where
    S: Fn(&I, &mut RngStream) -> O,
    Q: Fn(&I, &O) -> f64,
{
    sampler: S,
    scorer: Q,
    _marker: std::marker::PhantomData<fn(&I) -> O>,
}

impl<I: ?Sized, O, S, Q> FnMechanism<I, O, S, Q>
where
    S: Fn(&I, &mut RngStream) -> O,
    Q: Fn(&I, &O) -> f64,
{
    pub fn new(sampler: S, scorer: Q) -> Self {
        Self {
            sampler,
            scorer,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<I: ?Sized, O: Clone, S, Q> AmplifiableMechanism for FnMechanism<I, O, S, Q>
where
    S: Fn(&I, &mut RngStream) -> O,
    Q: Fn(&I, &O) -> f64,
{
    type Input = I;
    type Outcome = O;

    fn sample(&self, input: &I, rng: &mut RngStream) -> O {
        (self.sampler)(input, rng)
    }

    fn score(&self, input: &I, outcome: &O) -> f64 {
        (self.scorer)(input, outcome)
    }
}

/// Runs the mechanism `t` times and keeps the best-scoring outcome (first
/// one on ties). Privacy degrades to `t` times that of one run.
pub fn repeat_best<M: AmplifiableMechanism>(
    mech: &M,
    input: &M::Input,
    t: usize,
    rng: &mut RngStream,
) -> Result<M::Outcome> {
    if t == 0 {
        return Err(invalid("t", "must be at least 1"));
    }
    let mut best: Option<(M::Outcome, f64)> = None;
    for i in 0..t {
        let o = mech.sample(input, &mut rng.child(i as u64));
        let s = mech.score(input, &o);
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((o, s));
        }
    }
    Ok(best.expect("t >= 1").0)
}

/// Number of real draws `T` and dummies `T'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmplificationParameters {
    pub t: usize,
    pub t_prime: usize,
}

/// `T = ⌈(8/x)² ln(1/x)⌉` with `x = ε'δp`, and `T' = ⌈sqrt(4 T ln T) / ε'⌉`.
pub fn amplification_parameters(
    epsilon_prime: f64,
    delta: f64,
    p: f64,
) -> Result<AmplificationParameters> {
    if !(epsilon_prime > 0.0 && epsilon_prime <= 0.5) {
        return Err(invalid(
            "epsilon_prime",
            format!("must lie in (0, 1/2], got {epsilon_prime}"),
        ));
    }
    require_positive("delta", delta)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid("p", format!("must lie in (0, 1), got {p}")));
    }
    let x = epsilon_prime * delta * p;
    if x >= 1.0 {
        return Err(invalid("delta", "epsilon' * delta * p must be below 1"));
    }
    let t = ((8.0 / x).powi(2) * (1.0 / x).ln()).ceil();
    if t > 1e9 {
        return Err(Error::TooLarge {
            what: "amplification draws",
            detail: format!("T = {t}"),
        });
    }
    let t = t as usize;
    let t_prime = ((4.0 * t as f64 * (t as f64).ln()).sqrt() / epsilon_prime).ceil() as usize;
    Ok(AmplificationParameters { t, t_prime })
}

/// Score threshold `Q - (4/ε') ln(1/(ε'δp))` reached with probability
/// at least `1 - δ`.
pub fn amplified_quality(q: f64, epsilon_prime: f64, delta: f64, p: f64) -> f64 {
    q - 4.0 / epsilon_prime * (1.0 / (epsilon_prime * delta * p)).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub enum AmplifiedOutcome<O> {
    /// A real draw with its clamped score `min(Q, q)`.
    Real { outcome: O, score: f64 },
    /// One of the dummy candidates was selected.
    Dummy { score: f64 },
}

impl<O> AmplifiedOutcome<O> {
    pub fn score(&self) -> f64 {
        match self {
            AmplifiedOutcome::Real { score, .. } | AmplifiedOutcome::Dummy { score } => *score,
        }
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self, AmplifiedOutcome::Dummy { .. })
    }
}

/// Candidate pool: `T + 1` real draws scored `min(Q, q)` followed by `T'`
/// dummies scored `Q`.
pub fn candidate_pool<M: AmplifiableMechanism>(
    mech: &M,
    input: &M::Input,
    q: f64,
    params: AmplificationParameters,
    rng: &mut RngStream,
) -> (Vec<M::Outcome>, Vec<f64>) {
    let mut outcomes = Vec::with_capacity(params.t + 1);
    let mut scores = Vec::with_capacity(params.t + 1 + params.t_prime);
    for i in 0..=params.t {
        let o = mech.sample(input, &mut rng.child(i as u64));
        scores.push(mech.score(input, &o).min(q));
        outcomes.push(o);
    }
    scores.extend(std::iter::repeat_n(q, params.t_prime));
    (outcomes, scores)
}

/// Exponential mechanism at `ε'` over the candidate pool.
pub fn private_amplify<M: AmplifiableMechanism>(
    mech: &M,
    input: &M::Input,
    q: f64,
    epsilon_prime: f64,
    delta: f64,
    p: f64,
    rng: &mut RngStream,
) -> Result<AmplifiedOutcome<M::Outcome>> {
    if !q.is_finite() {
        return Err(invalid("q", "must be finite"));
    }
    if mech.sensitivity() > 1.0 {
        return Err(invalid(
            "sensitivity",
            format!("score sensitivity {} exceeds 1", mech.sensitivity()),
        ));
    }
    let params = amplification_parameters(epsilon_prime, delta, p)?;
    let (mut outcomes, scores) = candidate_pool(mech, input, q, params, rng);
    let mut select = rng.child(u64::MAX);
    let i = exp_mechanism_index(&scores, epsilon_prime, &mut select)?;
    Ok(if i < outcomes.len() {
        AmplifiedOutcome::Real {
            outcome: outcomes.swap_remove(i),
            score: scores[i],
        }
    } else {
        AmplifiedOutcome::Dummy { score: q }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    /// Returns `q_good` with probability `p`, otherwise `q_bad`.
    fn coin(p: f64, good: f64, bad: f64) -> impl AmplifiableMechanism<Input = (), Outcome = f64> {
        FnMechanism::new(
            move |_: &(), rng: &mut RngStream| if rng.uniform() < p { good } else { bad },
            |_: &(), o: &f64| *o,
        )
    }

    #[test]
    fn parameter_examples() {
        let a = amplification_parameters(0.5, 0.5, 0.5).unwrap();
        assert_eq!(a.t, 8518);
        let expect = ((4.0 * 8518.0 * 8518f64.ln()).sqrt() / 0.5).ceil() as usize;
        assert_eq!(a.t_prime, expect);
        assert_eq!(a.t_prime, 1111);
        let half = amplification_parameters(0.5, 0.5, 0.25).unwrap();
        let ratio = half.t as f64 / a.t as f64;
        assert!((ratio - 4.0 * 16f64.ln() / 8f64.ln()).abs() < 1e-3);
        assert!(amplification_parameters(0.6, 0.5, 0.5).is_err());
        assert!(amplification_parameters(0.5, 0.5, 1.0).is_err());
        assert!(amplification_parameters(0.5, 0.0, 0.5).is_err());
    }

    #[test]
    fn repeat_best_basics() {
        let m = coin(0.5, 1.0, 0.0);
        assert!(repeat_best(&m, &(), 0, &mut RngStream::new(0, 0)).is_err());
        let det = coin(1.0, 3.0, 0.0);
        assert_eq!(
            repeat_best(&det, &(), 7, &mut RngStream::new(0, 0)).unwrap(),
            3.0
        );
        // one run coincides with the base sampler on the same stream
        for seed in 0..50 {
            let rng = RngStream::new(seed, 0);
            let direct = m.sample(&(), &mut rng.child(0));
            assert_eq!(repeat_best(&m, &(), 1, &mut rng.clone()).unwrap(), direct);
        }
    }

    #[test]
    fn repeat_best_success_rate() {
        let m = coin(0.5, 1.0, 0.0);
        let rng = RngStream::new(1, 0);
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|&i| repeat_best(&m, &(), 10, &mut rng.child(i)).unwrap() >= 1.0)
            .count();
        let target = 1.0 - 2f64.powi(-10);
        let sigma = (target * (1.0 - target) / trials as f64).sqrt();
        assert!(hits as f64 / trials as f64 >= target - 3.0 * sigma);
    }

    #[test]
    fn pool_clamps_and_counts_calls() {
        let calls = Cell::new(0usize);
        let m = FnMechanism::new(
            |_: &(), rng: &mut RngStream| {
                calls.set(calls.get() + 1);
                rng.uniform() * 10.0
            },
            |_: &(), o: &f64| *o,
        );
        let params = amplification_parameters(0.5, 0.5, 0.5).unwrap();
        let (outs, scores) = candidate_pool(&m, &(), 5.0, params, &mut RngStream::new(0, 0));
        assert_eq!(calls.get(), params.t + 1);
        assert_eq!(outs.len(), params.t + 1);
        assert_eq!(scores.len(), params.t + 1 + params.t_prime);
        for (o, s) in outs.iter().zip(&scores) {
            assert_eq!(*s, o.min(5.0));
        }
        assert!(scores[params.t + 1..].iter().all(|&s| s == 5.0));
        calls.set(0);
        private_amplify(&m, &(), 5.0, 0.5, 0.5, 0.5, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(calls.get(), params.t + 1);
    }

    #[test]
    fn always_good_dummy_odds() {
        let m = coin(0.99, 2.0, 2.0);
        let params = amplification_parameters(0.5, 0.3, 0.99).unwrap();
        let expect = params.t_prime as f64 / (params.t + 1 + params.t_prime) as f64;
        assert!(expect <= 0.15);
        let trials = 300;
        let mut dummies = 0;
        for i in 0..trials {
            match private_amplify(&m, &(), 2.0, 0.5, 0.3, 0.99, &mut RngStream::new(i, 4)).unwrap()
            {
                AmplifiedOutcome::Real { score, .. } => assert_eq!(score, 2.0),
                AmplifiedOutcome::Dummy { .. } => dummies += 1,
            }
        }
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((dummies as f64 / trials as f64 - expect).abs() < 4.0 * sigma);
    }

    #[test]
    fn scores_stay_in_support() {
        let m = coin(0.5, -3.0, -7.0);
        for i in 0..50 {
            if let AmplifiedOutcome::Real { outcome, score } =
                private_amplify(&m, &(), 10.0, 0.5, 0.5, 0.5, &mut RngStream::new(i, 5)).unwrap()
            {
                assert!(outcome == -3.0 || outcome == -7.0);
                assert_eq!(score, outcome);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = coin(0.5, 1.0, 0.0);
        assert!(
            private_amplify(&m, &(), f64::NAN, 0.5, 0.5, 0.5, &mut RngStream::new(0, 0)).is_err()
        );
        struct Loud;
        impl AmplifiableMechanism for Loud {
            type Input = ();
            type Outcome = ();
            fn sample(&self, _: &(), _: &mut RngStream) {}
            fn score(&self, _: &(), _: &()) -> f64 {
                0.0
            }
            fn sensitivity(&self) -> f64 {
                2.0
            }
        }
        assert!(
            private_amplify(&Loud, &(), 1.0, 0.5, 0.5, 0.5, &mut RngStream::new(0, 0)).is_err()
        );
    }

    #[test]
    fn large_epsilon_concentrates_on_best() {
        let pool = [0.0, 1.0, 5.0, 5.0];
        let p = crate::mech::exp_mechanism_probabilities(&pool, 50.0).unwrap();
        assert!(p[2] + p[3] > 1.0 - 1e-12);
    }
}
