//! Deterministic complete automata with optional priorities (safety/parity)
//! and optional transition rewards (mean payoff).

use std::collections::HashMap;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result, Violation};

use super::{Alphabet, Guard, Lasso, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomatonKind {
    Safety,
    Parity,
    MeanPayoff,
}

impl AutomatonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AutomatonKind::Safety => "safety",
            AutomatonKind::Parity => "parity",
            AutomatonKind::MeanPayoff => "meanpayoff",
        }
    }

    pub fn is_qualitative(self) -> bool {
        matches!(self, AutomatonKind::Safety | AutomatonKind::Parity)
    }
}

/// A deterministic complete automaton over a symbolic alphabet. The
/// transition table is dense over the letter index. Rewards are exact
/// rationals; they are converted to doubles only when a stochastic model is
/// solved.
#[derive(Debug, Clone)]
pub struct SpecAutomaton {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: usize,
    delta: Vec<Vec<usize>>,
    priority: Option<Vec<u32>>,
    reward: Option<Vec<Vec<Rational64>>>,
    kind: AutomatonKind,
}

/// One symbolic transition of the text format: a guard plus an optional
/// reward.
#[derive(Debug, Clone)]
pub struct GuardedTransition {
    pub from: usize,
    pub guard: Guard,
    pub to: usize,
    pub reward: Option<Rational64>,
}

impl SpecAutomaton {
    /// Builds an automaton from guarded transitions. The guards of every
    /// state must tile the alphabet exactly once (that is the completeness
    /// and determinism check of the text format).
    pub fn from_guarded(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: usize,
        transitions: &[GuardedTransition],
        priority: Option<Vec<u32>>,
        kind: AutomatonKind,
    ) -> Result<SpecAutomaton> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Validation(vec![Violation::Other {
                detail: "automaton needs at least one state".into(),
            }]));
        }
        if initial >= n {
            return Err(Error::Validation(vec![Violation::Other {
                detail: format!("initial state index {initial} out of range"),
            }]));
        }
        let letters = alphabet.len();
        let mut delta = vec![vec![usize::MAX; letters]; n];
        let has_rewards = kind == AutomatonKind::MeanPayoff;
        let mut reward = if has_rewards {
            Some(vec![vec![Rational64::zero(); letters]; n])
        } else {
            None
        };
        let mut violations = Vec::new();
        for t in transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::Validation(vec![Violation::Other {
                    detail: format!("transition references state out of range ({} -> {})", t.from, t.to),
                }]));
            }
            if let Some(r) = t.reward {
                if r < Rational64::zero() {
                    return Err(Error::Validation(vec![Violation::Other {
                        detail: format!("negative reward on transition from '{}'", states[t.from]),
                    }]));
                }
            }
            for l in t.guard.expand(&alphabet) {
                let slot = &mut delta[t.from][l.index()];
                if *slot != usize::MAX {
                    violations.push(Violation::Nondeterministic {
                        state: states[t.from].clone(),
                        detail: format!("letter {} matched twice", alphabet.format_letter_set(l)),
                    });
                } else {
                    *slot = t.to;
                    if let Some(rw) = reward.as_mut() {
                        rw[t.from][l.index()] = t.reward.unwrap_or_else(Rational64::zero);
                    }
                }
            }
        }
        for (s, row) in delta.iter().enumerate() {
            for (li, tgt) in row.iter().enumerate() {
                if *tgt == usize::MAX {
                    violations.push(Violation::Incomplete {
                        state: states[s].clone(),
                        detail: format!(
                            "no transition on {}",
                            alphabet.format_letter_set(Letter(li as u32))
                        ),
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let automaton = SpecAutomaton { alphabet, states, initial, delta, priority, reward, kind };
        let shape = automaton.validate();
        if !shape.is_empty() {
            return Err(Error::Validation(shape));
        }
        Ok(automaton)
    }

    /// Builds an automaton directly from dense tables. Used by product
    /// constructions; the tables must already be total.
    pub(crate) fn from_dense(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: usize,
        delta: Vec<Vec<usize>>,
        priority: Option<Vec<u32>>,
        reward: Option<Vec<Vec<Rational64>>>,
        kind: AutomatonKind,
    ) -> SpecAutomaton {
        SpecAutomaton { alphabet, states, initial, delta, priority, reward, kind }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> AutomatonKind {
        self.kind
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, state: usize, letter: Letter) -> usize {
        self.delta[state][letter.index()]
    }

    pub fn priorities(&self) -> Option<&[u32]> {
        self.priority.as_deref()
    }

    pub fn priority_of(&self, state: usize) -> Option<u32> {
        self.priority.as_ref().map(|p| p[state])
    }

    pub fn has_rewards(&self) -> bool {
        self.reward.is_some()
    }

    pub fn reward_of(&self, state: usize, letter: Letter) -> Option<Rational64> {
        self.reward.as_ref().map(|r| r[state][letter.index()])
    }

    /// Maximum absolute transition reward, as a double. Zero for automata
    /// without rewards.
    pub fn max_abs_reward(&self) -> f64 {
        match &self.reward {
            None => 0.0,
            Some(rows) => rows
                .iter()
                .flat_map(|r| r.iter())
                .map(|q| rational_to_f64(*q).abs())
                .fold(0.0, f64::max),
        }
    }

    /// The run of the automaton on a finite word: `|w| + 1` states starting
    /// at the initial state.
    pub fn run(&self, w: &Word) -> Result<Vec<usize>> {
        w.check_alphabet(&self.alphabet)?;
        let mut states = Vec::with_capacity(w.len() + 1);
        let mut s = self.initial;
        states.push(s);
        for &l in &w.letters {
            s = self.step(s, l);
            states.push(s);
        }
        Ok(states)
    }

    /// The average of the transition rewards along the run on a finite
    /// nonempty word.
    pub fn mp_value_finite(&self, w: &Word) -> Result<Rational64> {
        if self.reward.is_none() {
            return Err(Error::Precondition("automaton has no rewards".into()));
        }
        if w.is_empty() {
            return Err(Error::UndefinedAverage("mean payoff of the empty word".into()));
        }
        w.check_alphabet(&self.alphabet)?;
        let mut sum = Rational64::zero();
        let mut s = self.initial;
        for &l in &w.letters {
            sum += self.reward_of(s, l).unwrap();
            s = self.step(s, l);
        }
        Ok(sum / Rational64::from_integer(w.len() as i64))
    }

    /// The mean payoff of the ultimately periodic word `prefix · cycle^ω`:
    /// the run is followed until the automaton state repeats at a cycle
    /// boundary, and the rewards are averaged over the detected period. For
    /// ultimately periodic words this equals the lim inf of the prefix
    /// averages.
    pub fn mp_value_lasso(&self, lasso: &Lasso) -> Result<Rational64> {
        if self.reward.is_none() {
            return Err(Error::Precondition("automaton has no rewards".into()));
        }
        lasso.check_alphabet(&self.alphabet)?;
        let (_, period_rewards, period_steps) = self.periodic_orbit(lasso);
        Ok(period_rewards / Rational64::from_integer(period_steps as i64))
    }

    /// Parity acceptance of the ultimately periodic word: true iff the
    /// minimum priority among the states visited on the eventual period is
    /// even.
    pub fn accepts_lasso(&self, lasso: &Lasso) -> Result<bool> {
        let priorities = self
            .priority
            .as_ref()
            .ok_or_else(|| Error::Precondition("automaton has no priorities".into()))?;
        lasso.check_alphabet(&self.alphabet)?;
        let (period_states, _, _) = self.periodic_orbit(lasso);
        let min = period_states.iter().map(|&s| priorities[s]).min().unwrap();
        Ok(min % 2 == 0)
    }

    /// Follows `prefix`, then iterates `cycle` until the state at the cycle
    /// boundary repeats. Returns the states visited during one period, the
    /// summed rewards over the period (zero if the automaton has no
    /// rewards), and the period length in letters.
    fn periodic_orbit(&self, lasso: &Lasso) -> (Vec<usize>, Rational64, usize) {
        let mut s = self.initial;
        for &l in &lasso.prefix {
            s = self.step(s, l);
        }
        let mut boundary_seen: HashMap<usize, usize> = HashMap::new();
        let mut boundary_order: Vec<usize> = Vec::new();
        let mut iteration = 0usize;
        loop {
            if let Some(&first) = boundary_seen.get(&s) {
                // One period = iterations [first, iteration); replay to
                // collect states and rewards.
                let mut state = boundary_order[first];
                let mut states = Vec::new();
                let mut rewards = Rational64::zero();
                let period_iters = iteration - first;
                for _ in 0..period_iters {
                    for &l in &lasso.cycle {
                        if let Some(r) = self.reward_of(state, l) {
                            rewards += r;
                        }
                        state = self.step(state, l);
                        states.push(state);
                    }
                }
                return (states, rewards, period_iters * lasso.cycle.len());
            }
            boundary_seen.insert(s, iteration);
            boundary_order.push(s);
            for &l in &lasso.cycle {
                s = self.step(s, l);
            }
            iteration += 1;
        }
    }

    /// Synchronous product of a qualitative automaton `self` with a
    /// mean-payoff automaton `quant`: priorities come from `self`, rewards
    /// from `quant`. Only states reachable from the joint initial state are
    /// kept.
    pub fn product_spec(&self, quant: &SpecAutomaton) -> Result<SpecAutomaton> {
        if !self.kind.is_qualitative() {
            return Err(Error::Precondition("left operand must be safety or parity".into()));
        }
        if !quant.has_rewards() {
            return Err(Error::Precondition("right operand must carry rewards".into()));
        }
        let product = self.raw_product(quant, self.kind)?;
        Ok(product)
    }

    /// Product of two mean-payoff automata over the same alphabet with
    /// pointwise summed rewards.
    pub fn product_sum_rewards(&self, other: &SpecAutomaton) -> Result<SpecAutomaton> {
        if !self.has_rewards() || !other.has_rewards() {
            return Err(Error::Precondition("both operands must carry rewards".into()));
        }
        self.raw_product(other, AutomatonKind::MeanPayoff)
    }

    /// Product of two safety automata over the same alphabet; the priority
    /// of a pair is the maximum of the component priorities, so the product
    /// rejects iff either component does.
    pub fn product_safety(&self, other: &SpecAutomaton) -> Result<SpecAutomaton> {
        if self.kind != AutomatonKind::Safety || other.kind != AutomatonKind::Safety {
            return Err(Error::Precondition("both operands must be safety automata".into()));
        }
        self.raw_product(other, AutomatonKind::Safety)
    }

    /// Reachable synchronous product. Priorities: from `self`, except that
    /// for safety×safety both sides contribute via max. Rewards: from
    /// `other`, except that when both sides carry rewards they are summed.
    fn raw_product(&self, other: &SpecAutomaton, kind: AutomatonKind) -> Result<SpecAutomaton> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "product operands have different alphabets: {} vs {}",
                self.alphabet, other.alphabet
            )));
        }
        let letters = self.alphabet.len();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        index.insert((self.initial, other.initial), 0);
        pairs.push((self.initial, other.initial));
        // BFS over reachable pairs; ids are assigned in discovery order, so
        // processing ids in order keeps `delta` aligned.
        let mut next = 0usize;
        while next < pairs.len() {
            let (sa, sb) = pairs[next];
            let mut row = Vec::with_capacity(letters);
            for li in 0..letters {
                let l = Letter(li as u32);
                let ta = self.step(sa, l);
                let tb = other.step(sb, l);
                let next_id = *index.entry((ta, tb)).or_insert_with(|| {
                    pairs.push((ta, tb));
                    pairs.len() - 1
                });
                row.push(next_id);
            }
            delta.push(row);
            next += 1;
        }

        let names: Vec<String> = pairs
            .iter()
            .map(|&(a, b)| format!("{}.{}", self.states[a], other.states[b]))
            .collect();

        let priority = match kind {
            AutomatonKind::MeanPayoff => None,
            AutomatonKind::Safety if other.priority.is_some() && self.priority.is_some() => {
                let pa = self.priority.as_ref().unwrap();
                let pb = other.priority.as_ref().unwrap();
                Some(pairs.iter().map(|&(a, b)| pa[a].max(pb[b])).collect())
            }
            _ => {
                let pa = self
                    .priority
                    .as_ref()
                    .ok_or_else(|| Error::Precondition("qualitative operand lacks priorities".into()))?;
                Some(pairs.iter().map(|&(a, _)| pa[a]).collect())
            }
        };

        let reward = if self.has_rewards() && other.has_rewards() {
            let ra = self.reward.as_ref().unwrap();
            let rb = other.reward.as_ref().unwrap();
            Some(
                pairs
                    .iter()
                    .map(|&(a, b)| (0..letters).map(|l| ra[a][l] + rb[b][l]).collect())
                    .collect(),
            )
        } else if let Some(rb) = &other.reward {
            Some(pairs.iter().map(|&(_, b)| rb[b].clone()).collect())
        } else {
            None
        };

        Ok(SpecAutomaton {
            alphabet: self.alphabet.clone(),
            states: names,
            initial: 0,
            delta,
            priority,
            reward,
            kind,
        })
    }

    /// The output-pusher automaton over an output alphabet: one state per
    /// output letter, and from every state the letter `σ` leads to the state
    /// tagged `σ`. After any nonempty word, the current state identifies the
    /// last letter read. All priorities are 0.
    pub fn output_pusher(out_alphabet: &Alphabet) -> SpecAutomaton {
        let letters = out_alphabet.len();
        let states: Vec<String> = out_alphabet
            .letters()
            .map(|l| out_alphabet.format_letter_set(l))
            .collect();
        let delta: Vec<Vec<usize>> = (0..letters).map(|_| (0..letters).collect()).collect();
        SpecAutomaton {
            alphabet: out_alphabet.clone(),
            states,
            initial: 0,
            delta,
            priority: Some(vec![0; letters]),
            reward: None,
            kind: AutomatonKind::Parity,
        }
    }

    /// Structural validation: priorities/rewards required by the declared
    /// kind, the safety shape, and reward nonnegativity. Returns the list of
    /// violations, empty when the automaton is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match self.kind {
            AutomatonKind::Safety | AutomatonKind::Parity => {
                if self.priority.is_none() {
                    out.push(Violation::Other {
                        detail: format!("{} automaton without priorities", self.kind.as_str()),
                    });
                }
            }
            AutomatonKind::MeanPayoff => {
                if self.reward.is_none() {
                    out.push(Violation::Other { detail: "mean-payoff automaton without rewards".into() });
                }
            }
        }
        if self.kind == AutomatonKind::Safety {
            if let Some(p) = &self.priority {
                if p.iter().any(|&x| x > 1) {
                    out.push(Violation::Other {
                        detail: "safety automaton with priorities outside {0,1}".into(),
                    });
                }
                for (s, row) in self.delta.iter().enumerate() {
                    if p[s] == 1 {
                        for &t in row {
                            if p[t] == 0 {
                                out.push(Violation::SafetyShape {
                                    from: self.states[s].clone(),
                                    to: self.states[t].clone(),
                                });
                                break;
                            }
                        }
                    }
                }
            }
        }
        if let Some(rows) = &self.reward {
            for (s, row) in rows.iter().enumerate() {
                if row.iter().any(|r| *r < Rational64::zero()) {
                    out.push(Violation::Other {
                        detail: format!("negative reward at state '{}'", self.states[s]),
                    });
                }
            }
        }
        out
    }
}

pub(crate) fn rational_to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
