//! Mealy machines: finite-state transducers from input letters to output
//! letters. The synthesis result container.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result, Violation};

use super::{Alphabet, Guard, Letter, Word};

#[derive(Debug, Clone)]
pub struct MealyMachine {
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    states: Vec<String>,
    initial: usize,
    delta: Vec<Vec<usize>>,
    lambda: Vec<Vec<Letter>>,
}

/// One symbolic machine transition: an input guard and a fully determined
/// output letter.
#[derive(Debug, Clone)]
pub struct MachineTransition {
    pub from: usize,
    pub guard: Guard,
    pub to: usize,
    pub output: Letter,
}

impl MealyMachine {
    /// Builds a machine from guarded transitions; the guards of every state
    /// must tile the input alphabet exactly once.
    pub fn from_guarded(
        input_alphabet: Alphabet,
        output_alphabet: Alphabet,
        states: Vec<String>,
        initial: usize,
        transitions: &[MachineTransition],
    ) -> Result<MealyMachine> {
        let n = states.len();
        if n == 0 || initial >= n {
            return Err(Error::Validation(vec![Violation::Other {
                detail: "machine needs states and a valid initial state".into(),
            }]));
        }
        let letters = input_alphabet.len();
        let mut delta = vec![vec![usize::MAX; letters]; n];
        let mut lambda = vec![vec![Letter::EMPTY; letters]; n];
        let mut violations = Vec::new();
        for t in transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::Validation(vec![Violation::Other {
                    detail: "machine transition references state out of range".into(),
                }]));
            }
            if !output_alphabet.contains_letter(t.output) {
                return Err(Error::Validation(vec![Violation::Other {
                    detail: "machine output outside output alphabet".into(),
                }]));
            }
            for l in t.guard.expand(&input_alphabet) {
                if delta[t.from][l.index()] != usize::MAX {
                    violations.push(Violation::Nondeterministic {
                        state: states[t.from].clone(),
                        detail: format!(
                            "input {} matched twice",
                            input_alphabet.format_letter_set(l)
                        ),
                    });
                } else {
                    delta[t.from][l.index()] = t.to;
                    lambda[t.from][l.index()] = t.output;
                }
            }
        }
        for (s, row) in delta.iter().enumerate() {
            for (li, tgt) in row.iter().enumerate() {
                if *tgt == usize::MAX {
                    violations.push(Violation::Incomplete {
                        state: states[s].clone(),
                        detail: format!(
                            "no transition on input {}",
                            input_alphabet.format_letter_set(Letter(li as u32))
                        ),
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        Ok(MealyMachine { input_alphabet, output_alphabet, states, initial, delta, lambda })
    }

    pub(crate) fn from_dense(
        input_alphabet: Alphabet,
        output_alphabet: Alphabet,
        states: Vec<String>,
        initial: usize,
        delta: Vec<Vec<usize>>,
        lambda: Vec<Vec<Letter>>,
    ) -> MealyMachine {
        MealyMachine { input_alphabet, output_alphabet, states, initial, delta, lambda }
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    /// The joint alphabet `2^{I ∪ O}`.
    pub fn joint_alphabet(&self) -> Result<Alphabet> {
        self.input_alphabet.join(&self.output_alphabet)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, state: usize, input: Letter) -> usize {
        self.delta[state][input.index()]
    }

    pub fn output(&self, state: usize, input: Letter) -> Letter {
        self.lambda[state][input.index()]
    }

    /// The outcome of the machine on an input word: position `i` carries
    /// `w_i ∪ λ(ρ_i, w_i)` over the joint alphabet.
    pub fn outcome(&self, w: &Word) -> Result<Word> {
        w.check_alphabet(&self.input_alphabet)?;
        let joint = self.joint_alphabet()?;
        let mut letters = Vec::with_capacity(w.len());
        let mut s = self.initial;
        for &l in &w.letters {
            let out = self.output(s, l);
            letters.push(self.input_alphabet.combine_into(l, &self.output_alphabet, out, &joint)?);
            s = self.step(s, l);
        }
        Ok(Word::new(letters))
    }

    /// Structural validation; the dense representation is total by
    /// construction, so this only reports alphabet anomalies.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (s, row) in self.lambda.iter().enumerate() {
            for l in row {
                if !self.output_alphabet.contains_letter(*l) {
                    out.push(Violation::Other {
                        detail: format!("output letter out of range at state '{}'", self.states[s]),
                    });
                }
            }
        }
        out
    }

    /// Input-output equivalence with another machine over the same
    /// alphabets, decided by a product reachability search for a mismatch.
    pub fn io_equivalent(&self, other: &MealyMachine) -> Result<bool> {
        if self.input_alphabet != other.input_alphabet || self.output_alphabet != other.output_alphabet
        {
            return Err(Error::AlphabetMismatch("machines have different alphabets".into()));
        }
        let mut seen = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert((self.initial, other.initial), ());
        queue.push_back((self.initial, other.initial));
        while let Some((a, b)) = queue.pop_front() {
            for l in self.input_alphabet.letters() {
                if self.output(a, l) != other.output(b, l) {
                    return Ok(false);
                }
                let next = (self.step(a, l), other.step(b, l));
                if seen.insert(next, ()).is_none() {
                    queue.push_back(next);
                }
            }
        }
        Ok(true)
    }

    /// Partition refinement over (output row, successor block) signatures.
    /// States in the same class are behaviorally equivalent; used to
    /// annotate DOT output with merge candidates.
    pub fn equivalence_classes(&self) -> Vec<usize> {
        let n = self.num_states();
        let mut class: Vec<usize> = vec![0; n];
        // Initial partition: identical output rows.
        let mut sig_ids: HashMap<Vec<Letter>, usize> = HashMap::new();
        for s in 0..n {
            let next_id = sig_ids.len();
            let id = *sig_ids.entry(self.lambda[s].clone()).or_insert(next_id);
            class[s] = id;
        }
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0; n];
            for s in 0..n {
                let succ: Vec<usize> = self.delta[s].iter().map(|&t| class[t]).collect();
                let next_id = sigs.len();
                let id = *sigs.entry((class[s], succ)).or_insert(next_id);
                next_class[s] = id;
            }
            if next_class == class {
                return class;
            }
            class = next_class;
        }
    }
}
