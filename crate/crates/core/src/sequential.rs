//! Mechanisms expressed as a sequence of random choices.
//!
//! Each sequential sampler in the crate (the vertex cover, set cover and
//! submodular greedy loops, exact-mode min-cut, k-median local search)
//! implements [`SequentialMechanism`]. The same description drives both
//! [`run_mechanism`], which samples one transcript, and the exact auditor in
//! [`crate::audit`], which expands every branch with its probability.

use crate::mech::sample_weighted;
use crate::rng::RngStream;

pub trait SequentialMechanism {
    type State: Clone;
    type Output: Ord + Clone;

    fn start(&self) -> Self::State;

    /// Natural-log weights of the available moves, unnormalized. An entry
    /// of `-inf` is a move that cannot happen. Empty when the run is over.
    fn moves(&self, state: &Self::State) -> Vec<f64>;

    fn advance(&self, state: &mut Self::State, choice: usize);

    fn output(&self, state: &Self::State) -> Self::Output;
}

/// Converts log weights into normalized probabilities.
pub fn normalize_log_weights(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Natural-log probabilities of each move.
pub fn log_probabilities(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let lse = max
        + log_weights
            .iter()
            .map(|&w| (w - max).exp())
            .sum::<f64>()
            .ln();
    log_weights.iter().map(|&w| w - lse).collect()
}

/// Samples one run. Each choice point consumes exactly one uniform draw,
/// except forced moves (a single option), which consume none.
pub fn run_mechanism<M: SequentialMechanism>(mech: &M, rng: &mut RngStream) -> M::Output {
    let state = run_to_end(mech, rng);
    mech.output(&state)
}

/// Like [`run_mechanism`] but returns the terminal state, for callers that
/// want internal bookkeeping as well as the output.
pub fn run_to_end<M: SequentialMechanism>(mech: &M, rng: &mut RngStream) -> M::State {
    let mut state = mech.start();
    loop {
        let moves = mech.moves(&state);
        if moves.is_empty() {
            return state;
        }
        let choice = if moves.len() == 1 {
            0
        } else {
            sample_weighted(&normalize_log_weights(&moves), rng)
        };
        mech.advance(&mut state, choice);
    }
}
