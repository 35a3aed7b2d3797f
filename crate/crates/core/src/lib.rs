//! Measurement and synthesis of finite-state reactive systems against a
//! qualitative (safety/parity) and a quantitative (mean-payoff) specification
//! under a probabilistic input assumption.
//!
//! The toolkit has two entry points:
//!
//! * [`measure::system_value`] computes how well a given Mealy machine
//!   satisfies the specifications: the expected long-run average reward of
//!   the quantitative spec, or bottom when the qualitative spec is violated
//!   with positive probability.
//! * [`synthesis::synthesize`] constructs a machine that satisfies the
//!   qualitative spec with probability 1 and maximizes the expected
//!   mean payoff, via MDPs with mean-payoff (parity) objectives.
//!
//! The solver core is self-contained: strongly connected component and end
//! component analysis over stochastic graphs, LU-based Markov chain
//! analysis, and a two-phase simplex LP solver.

pub mod automata;
pub mod clients;
pub mod dot;
pub mod error;
pub mod json;
pub mod lp;
pub mod measure;
pub mod mpp;
pub mod stochastic;
pub mod synthesis;


pub(crate) mod linalg;

pub use automata::{Alphabet, AutomatonKind, Guard, Lasso, Letter, MealyMachine, SpecAutomaton, Word};
pub use error::{Error, Result, Violation};
pub use measure::ValueOrBottom;
pub use stochastic::{MarkovChain, Mdp, PureMemorylessStrategy, RandomizedStrategy, StateKind};
