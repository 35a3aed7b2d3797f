//! Labeled Markov chains and MDPs: recurrence structure, long-run
//! frequencies, end components.

mod chain;
mod mdp;
mod scc;

pub use chain::{MarkovChain, Reward};
pub use mdp::{Mdp, PureMemorylessStrategy, RandomizedStrategy, StateKind, Transitions};

pub(crate) use scc::strongly_connected_components;

/// Distributions must sum to 1 within this tolerance.
pub const DISTRIBUTION_TOL: f64 = 1e-9;
