//! Value of a given Mealy machine with respect to a qualitative and a
//! quantitative specification under a probabilistic input assumption.
//!
//! The machine, the specs and the input chain are composed into a single
//! Markov chain that alternates between an input-selection step and a
//! deterministic response step; rewards sit on the response states, so the
//! chain's mean payoff is half the per-step system value.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::automata::{rational_to_f64, Alphabet, AutomatonKind, GuardedTransition, Guard, MealyMachine, SpecAutomaton};
use crate::error::{Error, Result};
use crate::stochastic::MarkovChain;

/// A measured value: a real or bottom. Bottom marks a system that violates
/// the qualitative specification with positive probability; it is a
/// distinct tag, never a sentinel number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueOrBottom {
    Value(f64),
    Bottom,
}

impl ValueOrBottom {
    pub fn is_bottom(&self) -> bool {
        matches!(self, ValueOrBottom::Bottom)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ValueOrBottom::Value(v) => Some(*v),
            ValueOrBottom::Bottom => None,
        }
    }
}

impl std::fmt::Display for ValueOrBottom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValueOrBottom::Value(v) => write!(f, "{v:.6}"),
            ValueOrBottom::Bottom => write!(f, "bottom"),
        }
    }
}

/// Checks that `a` and `b` are over the machine's joint alphabet and `env`
/// is labeled over the machine's input alphabet.
fn check_alphabets(
    m: &MealyMachine,
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
) -> Result<Alphabet> {
    let joint = m.joint_alphabet()?;
    if a.alphabet() != &joint {
        return Err(Error::AlphabetMismatch(format!(
            "qualitative spec alphabet {} differs from the joint alphabet {}",
            a.alphabet(),
            joint
        )));
    }
    if b.alphabet() != &joint {
        return Err(Error::AlphabetMismatch(format!(
            "quantitative spec alphabet {} differs from the joint alphabet {}",
            b.alphabet(),
            joint
        )));
    }
    match env.label_alphabet() {
        Some(al) if al == m.input_alphabet() => {}
        Some(al) => {
            return Err(Error::AlphabetMismatch(format!(
                "input chain alphabet {} differs from the machine input alphabet {}",
                al,
                m.input_alphabet()
            )));
        }
        None => {
            return Err(Error::AlphabetMismatch("input chain is not labeled".into()));
        }
    }
    let env_violations = env.validate();
    if !env_violations.is_empty() {
        return Err(Error::Validation(env_violations));
    }
    Ok(joint)
}

/// The combined Markov chain of machine × qualitative spec × quantitative
/// spec × input chain. States alternate between phase 0 (the environment
/// picks the next input by its distribution) and phase 1 (the machine's
/// response and the spec transitions are applied with probability 1).
/// Phase-1 states carry the quantitative spec's transition reward; phase-0
/// states carry reward 0; priorities are copied from the qualitative spec.
/// In the safety case the rewards of priority-1 states are overwritten to
/// bottom.
pub fn build_value_chain(
    m: &MealyMachine,
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
) -> Result<MarkovChain> {
    let joint = check_alphabets(m, a, b, env)?;
    if !a.kind().is_qualitative() {
        return Err(Error::Precondition("qualitative spec must be safety or parity".into()));
    }
    let priorities = a
        .priorities()
        .ok_or_else(|| Error::Precondition("qualitative spec lacks priorities".into()))?;
    if !b.has_rewards() {
        return Err(Error::Precondition("quantitative spec lacks rewards".into()));
    }

    // Product state: (machine, a, b); chain state: (product, env, phase).
    type Key = (usize, usize, usize, usize, u8);
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut states: Vec<Key> = Vec::new();
    let mut delta: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rewards: Vec<Option<f64>> = Vec::new();
    let mut prios: Vec<u32> = Vec::new();
    let mut names: Vec<String> = Vec::new();

    let initial_key = (m.initial(), a.initial(), b.initial(), env.initial(), 0u8);
    index.insert(initial_key, 0);
    states.push(initial_key);

    let mut next = 0usize;
    while next < states.len() {
        let (qm, qa, qb, qe, phase) = states[next];
        let prio = priorities[qa];
        let mut reward: Option<f64> = Some(0.0);
        let row: Vec<(usize, f64)> = if phase == 0 {
            // Environment move: pick the next input state.
            env.successors(qe)
                .iter()
                .map(|&(succ_env, p)| {
                    let key = (qm, qa, qb, succ_env, 1u8);
                    let id = *index.entry(key).or_insert_with(|| {
                        states.push(key);
                        states.len() - 1
                    });
                    (id, p)
                })
                .collect()
        } else {
            // Response move: apply the machine output to the specs.
            let input = env.label_of(qe).unwrap();
            let output = m.output(qm, input);
            let letter =
                m.input_alphabet().combine_into(input, m.output_alphabet(), output, &joint)?;
            reward = Some(rational_to_f64(b.reward_of(qb, letter).unwrap()));
            let key = (m.step(qm, input), a.step(qa, letter), b.step(qb, letter), qe, 0u8);
            let id = *index.entry(key).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            vec![(id, 1.0)]
        };
        if a.kind() == AutomatonKind::Safety && prio == 1 {
            reward = None;
        }
        delta.push(row);
        rewards.push(reward);
        prios.push(prio);
        names.push(format!(
            "({},{},{}|{}|{})",
            m.state_names()[qm],
            a.state_name(qa),
            b.state_name(qb),
            env.state_name(qe),
            phase
        ));
        next += 1;
    }

    Ok(MarkovChain::new(names, 0, delta).with_rewards(rewards).with_priorities(prios))
}

/// The value of machine `m` against qualitative spec `a` and quantitative
/// spec `b` under the input distribution of `env`. The factor 2 introduced
/// by the interleaved zero-reward states is corrected here, so callers see
/// per-step system values.
pub fn system_value(
    m: &MealyMachine,
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
) -> Result<ValueOrBottom> {
    system_value_with_options(m, a, b, env, false)
}

/// As [`system_value`]; with `split_chains` the parity check and the mean
/// payoff are computed on two separately built chains (each smaller because
/// it tracks only one spec), producing the same answer.
pub fn system_value_with_options(
    m: &MealyMachine,
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
    split_chains: bool,
) -> Result<ValueOrBottom> {
    if split_chains && a.kind() == AutomatonKind::Parity {
        let trivial = trivial_quantitative(a.alphabet());
        let parity_chain = build_value_chain(m, a, &trivial, env)?;
        if !parity_chain.parity_almost_sure(parity_chain.initial())? {
            return Ok(ValueOrBottom::Bottom);
        }
        let trivial_qual = trivial_qualitative(a.alphabet());
        let reward_chain = build_value_chain(m, &trivial_qual, b, env)?;
        return match reward_chain.mean_payoff(reward_chain.initial())? {
            Some(v) => Ok(ValueOrBottom::Value(2.0 * v)),
            None => Ok(ValueOrBottom::Bottom),
        };
    }
    let chain = build_value_chain(m, a, b, env)?;
    match a.kind() {
        AutomatonKind::Parity => {
            if !chain.parity_almost_sure(chain.initial())? {
                return Ok(ValueOrBottom::Bottom);
            }
            match chain.mean_payoff(chain.initial())? {
                Some(v) => Ok(ValueOrBottom::Value(2.0 * v)),
                None => Ok(ValueOrBottom::Bottom),
            }
        }
        AutomatonKind::Safety => match chain.mean_payoff(chain.initial())? {
            Some(v) => Ok(ValueOrBottom::Value(2.0 * v)),
            None => Ok(ValueOrBottom::Bottom),
        },
        AutomatonKind::MeanPayoff => {
            Err(Error::Precondition("qualitative spec must be safety or parity".into()))
        }
    }
}

/// True iff the machine satisfies the qualitative spec with probability 1
/// under the input assumption (rewards are ignored).
pub fn satisfies_under_mu(m: &MealyMachine, a: &SpecAutomaton, env: &MarkovChain) -> Result<bool> {
    let trivial = trivial_quantitative(a.alphabet());
    let chain = build_value_chain(m, a, &trivial, env)?;
    chain.parity_almost_sure(chain.initial())
}

/// One-state all-priority-0 qualitative spec over `alphabet`.
pub fn trivial_qualitative(alphabet: &Alphabet) -> SpecAutomaton {
    SpecAutomaton::from_guarded(
        alphabet.clone(),
        vec!["t".into()],
        0,
        &[GuardedTransition { from: 0, guard: Guard::TRUE, to: 0, reward: None }],
        Some(vec![0]),
        AutomatonKind::Parity,
    )
    .expect("trivial qualitative automaton")
}

/// One-state constant-0 mean-payoff spec over `alphabet`.
pub fn trivial_quantitative(alphabet: &Alphabet) -> SpecAutomaton {
    SpecAutomaton::from_guarded(
        alphabet.clone(),
        vec!["t".into()],
        0,
        &[GuardedTransition { from: 0, guard: Guard::TRUE, to: 0, reward: Some(Rational64::zero()) }],
        None,
        AutomatonKind::MeanPayoff,
    )
    .expect("trivial quantitative automaton")
}

/// The exact average of the quantitative value over all input prefixes of
/// length `horizon` under the uniform input distribution, computed by
/// dynamic programming over (machine × spec) states instead of enumerating
/// the exponentially many prefixes. Used to cross-check that the
/// uniform-prefix measure converges to the chain-based value.
pub fn uniform_prefix_value(
    m: &MealyMachine,
    b: &SpecAutomaton,
    horizon: usize,
) -> Result<BigRational> {
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    const MAX_HORIZON: usize = 4096;
    if horizon > MAX_HORIZON {
        return Err(Error::HorizonTooLarge(format!(
            "horizon {horizon} exceeds the DP limit {MAX_HORIZON}"
        )));
    }
    let joint = m.joint_alphabet()?;
    if b.alphabet() != &joint {
        return Err(Error::AlphabetMismatch(
            "quantitative spec must be over the machine's joint alphabet".into(),
        ));
    }
    if !b.has_rewards() {
        return Err(Error::Precondition("quantitative spec lacks rewards".into()));
    }
    let inputs = m.input_alphabet().len();
    let uniform = BigRational::new(BigInt::one(), BigInt::from(inputs));

    // dist[(machine state, spec state)] = probability under uniform inputs.
    let mut dist: HashMap<(usize, usize), BigRational> = HashMap::new();
    dist.insert((m.initial(), b.initial()), BigRational::one());
    let mut expected_total = BigRational::zero();
    for _ in 0..horizon {
        let mut next: HashMap<(usize, usize), BigRational> = HashMap::new();
        for ((qm, qb), p) in dist {
            for input in m.input_alphabet().letters() {
                let output = m.output(qm, input);
                let letter =
                    m.input_alphabet().combine_into(input, m.output_alphabet(), output, &joint)?;
                let r = b.reward_of(qb, letter).unwrap();
                let step_p = &p * &uniform;
                expected_total +=
                    &step_p * BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
                let key = (m.step(qm, input), b.step(qb, letter));
                *next.entry(key).or_insert_with(BigRational::zero) += step_p;
            }
        }
        dist = next;
    }
    Ok(expected_total / BigRational::new(BigInt::from(horizon), BigInt::one()))
}

/// f64 view of a [`BigRational`], for tolerance comparisons in callers.
pub fn big_rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
