//! Differentially private combinatorial optimization.
//!
//! Private mechanisms for min-cut, k-median, vertex cover, set cover,
//! submodular (combinatorial public projects) maximization, facility
//! location and Steiner forest, plus amplification wrappers, an exact
//! privacy auditor and brute-force optimum oracles for small instances.
//!
//! Every randomized entry point takes an [`RngStream`]; a fixed
//! `(seed, stream)` pair replays the same result.

pub mod amplify;
pub mod audit;
pub mod cpp;
pub mod error;
pub mod hst;
pub mod instances;
pub mod k_median;
pub mod matching;
pub mod mech;
pub mod min_cut;
pub mod rng;
pub mod sequential;
pub mod set_cover;
pub mod vertex_cover;

pub use error::{Error, Result};
pub use mech::{exp_mechanism, laplace_noise, PrivacyBudget, ScoredCandidate};
pub use rng::RngStream;
pub use sequential::{run_mechanism, SequentialMechanism};
