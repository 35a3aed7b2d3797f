//! Shared fixtures and independent oracles for the integration suites.
//!
//! Oracles intentionally avoid the library's solver paths: they re-derive
//! expected values by brute force (step simulation, strategy enumeration,
//! naive Gaussian elimination, power iteration) so that agreement is
//! meaningful.

#![allow(dead_code)]

use mpsynth::automata::{
    Alphabet, AutomatonKind, Guard, GuardedTransition, Letter, MachineTransition, MealyMachine,
    SpecAutomaton,
};
use mpsynth::stochastic::{MarkovChain, Mdp, PureMemorylessStrategy, Transitions};
use num_rational::Rational64;
use num_traits::{One, Zero};

pub mod oracles;
pub mod randgen;

/// The joint alphabet of the two-client examples: {g1, g2, r1, r2}.
pub fn two_client_alphabet() -> Alphabet {
    Alphabet::new(["r1", "r2", "g1", "g2"]).unwrap()
}

/// The per-client request/grant reward automaton (the figure-4 shape) over
/// an arbitrary alphabet containing `r` and `g`.
pub fn reward_automaton(alphabet: &Alphabet, r: &str, g: &str) -> SpecAutomaton {
    let parse = |t: String| Guard::parse(&t, alphabet).unwrap();
    let one = Rational64::one();
    let zero = Rational64::zero();
    SpecAutomaton::from_guarded(
        alphabet.clone(),
        vec![format!("{r}_idle"), format!("{r}_pend")],
        0,
        &[
            GuardedTransition { from: 0, guard: parse(g.to_string()), to: 0, reward: Some(one) },
            GuardedTransition { from: 0, guard: parse(format!("!{r} & !{g}")), to: 0, reward: Some(one) },
            GuardedTransition { from: 0, guard: parse(format!("{r} & !{g}")), to: 1, reward: Some(zero) },
            GuardedTransition { from: 1, guard: parse(format!("!{g}")), to: 1, reward: Some(zero) },
            GuardedTransition { from: 1, guard: parse(g.to_string()), to: 0, reward: Some(one) },
        ],
        None,
        AutomatonKind::MeanPayoff,
    )
    .unwrap()
}

/// The summed two-client quantitative spec A1 x A2.
pub fn two_client_quantitative() -> SpecAutomaton {
    let joint = two_client_alphabet();
    let a1 = reward_automaton(&joint, "r1", "g1");
    let a2 = reward_automaton(&joint, "r2", "g2");
    a1.product_sum_rewards(&a2).unwrap()
}

/// The blind alternator M1: grants g1 and g2 in turns regardless of
/// requests.
pub fn machine_m1() -> MealyMachine {
    let inputs = Alphabet::new(["r1", "r2"]).unwrap();
    let outputs = Alphabet::new(["g1", "g2"]).unwrap();
    let g1 = outputs.letter(["g1"]).unwrap();
    let g2 = outputs.letter(["g2"]).unwrap();
    MealyMachine::from_guarded(
        inputs,
        outputs,
        vec!["q0".into(), "q1".into()],
        0,
        &[
            MachineTransition { from: 0, guard: Guard::TRUE, to: 1, output: g1 },
            MachineTransition { from: 1, guard: Guard::TRUE, to: 0, output: g2 },
        ],
    )
    .unwrap()
}

/// The three-state controller M2: serves client 2 when only client 2
/// requests, serves client 1 by default, and alternates under conflicts.
pub fn machine_m2() -> MealyMachine {
    let inputs = Alphabet::new(["r1", "r2"]).unwrap();
    let outputs = Alphabet::new(["g1", "g2"]).unwrap();
    let parse = |t: &str| Guard::parse(t, &inputs).unwrap();
    let g1 = outputs.letter(["g1"]).unwrap();
    let g2 = outputs.letter(["g2"]).unwrap();
    MealyMachine::from_guarded(
        inputs.clone(),
        outputs,
        vec!["q0".into(), "q1".into(), "q2".into()],
        0,
        &[
            MachineTransition { from: 0, guard: parse("!r2"), to: 0, output: g1 },
            MachineTransition { from: 0, guard: parse("!r1 & r2"), to: 0, output: g2 },
            MachineTransition { from: 0, guard: parse("r1 & r2"), to: 1, output: g1 },
            MachineTransition { from: 1, guard: parse("!r1"), to: 0, output: g2 },
            MachineTransition { from: 1, guard: parse("r1"), to: 2, output: g2 },
            MachineTransition { from: 2, guard: parse("r2"), to: 1, output: g1 },
            MachineTransition { from: 2, guard: parse("!r2"), to: 0, output: g1 },
        ],
    )
    .unwrap()
}

/// The uniform input chain over `vars`: one state per letter, all rows
/// uniform.
pub fn uniform_chain(vars: &[&str]) -> MarkovChain {
    let alphabet = Alphabet::new(vars.to_vec()).unwrap();
    let letters = alphabet.len();
    let p = 1.0 / letters as f64;
    let row: Vec<(usize, f64)> = (0..letters).map(|t| (t, p)).collect();
    let names: Vec<String> = alphabet.letters().map(|l| alphabet.format_letter_set(l)).collect();
    let labels: Vec<Letter> = alphabet.letters().collect();
    MarkovChain::new(names, 0, vec![row; letters]).with_labels(alphabet, labels)
}

/// A trivial all-accepting qualitative spec over the two-client joint
/// alphabet.
pub fn two_client_trivial_qualitative() -> SpecAutomaton {
    mpsynth::measure::trivial_qualitative(&two_client_alphabet())
}

/// Enumerates every pure memoryless strategy of an MDP.
pub fn enumerate_strategies(g: &Mdp) -> Vec<PureMemorylessStrategy> {
    let mut player_states = Vec::new();
    for s in 0..g.num_states() {
        if let Transitions::Choices(c) = g.transitions(s) {
            player_states.push((s, c.clone()));
        }
    }
    let mut all = vec![PureMemorylessStrategy::new()];
    for (s, choices) in player_states {
        let mut next = Vec::with_capacity(all.len() * choices.len());
        for pi in &all {
            for &t in &choices {
                let mut extended = pi.clone();
                extended.set(s, t);
                next.push(extended);
            }
        }
        all = next;
    }
    all
}
