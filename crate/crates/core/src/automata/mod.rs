//! Symbolic alphabets over Boolean signals, deterministic complete automata
//! with priorities and rewards, Mealy machines, and product constructions.

mod alphabet;
mod guard;
mod machine;
mod spec;
mod word;

pub use alphabet::{Alphabet, Letter};
pub use guard::Guard;
pub use machine::{MachineTransition, MealyMachine};
pub use spec::{AutomatonKind, GuardedTransition, SpecAutomaton};
pub use word::{Lasso, Word};

pub(crate) use spec::rational_to_f64;

/// Maximum number of variables per alphabet. Transition tables are dense
/// over the letter index, so alphabets must stay desk-sized.
pub const MAX_VARIABLES: usize = 16;
