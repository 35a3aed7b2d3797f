//! Seeded random model generators for the property and oracle suites.

use mpsynth::automata::{
    Alphabet, AutomatonKind, Guard, GuardedTransition, Letter, MachineTransition, MealyMachine,
    SpecAutomaton,
};
use mpsynth::stochastic::{MarkovChain, Mdp, Transitions};
use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A normalized random distribution over 1..=max_support distinct targets.
fn random_row(rng: &mut StdRng, n: usize, max_support: usize) -> Vec<(usize, f64)> {
    let support = rng.gen_range(1..=max_support.min(n));
    let mut targets: Vec<usize> = (0..n).collect();
    for i in 0..support {
        let j = rng.gen_range(i..n);
        targets.swap(i, j);
    }
    let mut weights: Vec<f64> = (0..support).map(|_| rng.gen_range(1..=8) as f64).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut row: Vec<(usize, f64)> = targets[..support].iter().copied().zip(weights).collect();
    row.sort_by_key(|&(t, _)| t);
    row
}

/// Random MDP with `2..=max_states` states, integer rewards `0..=5`,
/// priorities `0..max_priorities`, and a bounded number of player-1 edges
/// (keeps strategy enumeration tractable).
pub fn random_mdp(seed: u64, max_states: usize, max_priorities: u32) -> Mdp {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_states);
    let mut transitions = Vec::with_capacity(n);
    for _ in 0..n {
        if r.gen_bool(0.5) {
            let choices = random_row(&mut r, n, 3).into_iter().map(|(t, _)| t).collect();
            transitions.push(Transitions::Choices(choices));
        } else {
            transitions.push(Transitions::Distribution(random_row(&mut r, n, 3)));
        }
    }
    let rewards: Vec<Option<f64>> = (0..n).map(|_| Some(r.gen_range(0..=5) as f64)).collect();
    let priorities: Vec<u32> = (0..n).map(|_| r.gen_range(0..max_priorities)).collect();
    let names = (0..n).map(|s| format!("s{s}")).collect();
    Mdp::new(names, 0, transitions).with_rewards(rewards).with_priorities(priorities)
}

/// Random Markov chain with rewards (and optionally priorities).
pub fn random_chain(seed: u64, max_states: usize, with_priorities: bool) -> MarkovChain {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_states);
    let delta: Vec<Vec<(usize, f64)>> = (0..n).map(|_| random_row(&mut r, n, 3)).collect();
    let names = (0..n).map(|s| format!("s{s}")).collect();
    let mut chain = MarkovChain::new(names, 0, delta)
        .with_rewards((0..n).map(|_| Some(r.gen_range(0..=5) as f64)).collect());
    if with_priorities {
        chain = chain.with_priorities((0..n).map(|_| r.gen_range(0..3)).collect());
    }
    chain
}

/// A random MDP whose whole state space is one end component with even
/// minimum priority: a ring plus random internal edges.
pub fn random_single_ec(seed: u64, max_states: usize, max_priorities: u32) -> Mdp {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_states);
    let mut transitions = Vec::with_capacity(n);
    for s in 0..n {
        let next = (s + 1) % n;
        if r.gen_bool(0.5) {
            let mut choices = vec![next];
            if r.gen_bool(0.6) {
                let extra = r.gen_range(0..n);
                if !choices.contains(&extra) {
                    choices.push(extra);
                }
            }
            choices.sort_unstable();
            transitions.push(Transitions::Choices(choices));
        } else {
            let mut row = vec![(next, 1.0)];
            if r.gen_bool(0.6) {
                let extra = r.gen_range(0..n);
                if extra != next {
                    let p = r.gen_range(1..=3) as f64 / 10.0;
                    row = vec![(next, 1.0 - p), (extra, p)];
                    row.sort_by_key(|&(t, _)| t);
                }
            }
            transitions.push(Transitions::Distribution(row));
        }
    }
    let rewards: Vec<Option<f64>> = (0..n).map(|_| Some(r.gen_range(0..=5) as f64)).collect();
    let mut priorities: Vec<u32> = (0..n).map(|_| r.gen_range(0..max_priorities)).collect();
    priorities[0] = 0; // force an even minimum
    let names = (0..n).map(|s| format!("s{s}")).collect();
    Mdp::new(names, 0, transitions).with_rewards(rewards).with_priorities(priorities)
}

/// Random deterministic complete automaton over `vars`, with rewards and/or
/// priorities, built through the public guard interface (one exact guard
/// per letter).
pub fn random_automaton(
    seed: u64,
    vars: &[&str],
    max_states: usize,
    kind: AutomatonKind,
) -> SpecAutomaton {
    let mut r = rng(seed);
    let alphabet = Alphabet::new(vars.to_vec()).unwrap();
    let n = r.gen_range(1..=max_states);
    let mut transitions = Vec::new();
    for s in 0..n {
        for l in alphabet.letters() {
            let to = if kind == AutomatonKind::Safety && s == n - 1 && n > 1 {
                n - 1 // absorbing bad state keeps the safety shape
            } else {
                r.gen_range(0..n)
            };
            let reward = (kind == AutomatonKind::MeanPayoff)
                .then(|| Rational64::from_integer(r.gen_range(0..=5)));
            transitions.push(GuardedTransition {
                from: s,
                guard: Guard::exactly(l, &alphabet),
                to,
                reward,
            });
        }
    }
    let priorities = match kind {
        AutomatonKind::MeanPayoff => None,
        AutomatonKind::Parity => Some((0..n).map(|_| r.gen_range(0..3)).collect()),
        AutomatonKind::Safety => {
            Some((0..n).map(|s| u32::from(s == n - 1 && n > 1)).collect())
        }
    };
    let names = (0..n).map(|s| format!("q{s}")).collect();
    SpecAutomaton::from_guarded(alphabet, names, 0, &transitions, priorities, kind).unwrap()
}

/// Random Mealy machine over the given variable split.
pub fn random_machine(
    seed: u64,
    inputs: &[&str],
    outputs: &[&str],
    max_states: usize,
) -> MealyMachine {
    let mut r = rng(seed);
    let input_alphabet = Alphabet::new(inputs.to_vec()).unwrap();
    let output_alphabet = Alphabet::new(outputs.to_vec()).unwrap();
    let n = r.gen_range(1..=max_states);
    let mut transitions = Vec::new();
    for s in 0..n {
        for l in input_alphabet.letters() {
            transitions.push(MachineTransition {
                from: s,
                guard: Guard::exactly(l, &input_alphabet),
                to: r.gen_range(0..n),
                output: Letter(r.gen_range(0..output_alphabet.len()) as u32),
            });
        }
    }
    let names = (0..n).map(|s| format!("m{s}")).collect();
    MealyMachine::from_guarded(input_alphabet, output_alphabet, names, 0, &transitions).unwrap()
}

/// Random finite word over an alphabet.
pub fn random_word(seed: u64, alphabet: &Alphabet, len: usize) -> Vec<Letter> {
    let mut r = rng(seed);
    (0..len).map(|_| Letter(r.gen_range(0..alphabet.len()) as u32)).collect()
}
