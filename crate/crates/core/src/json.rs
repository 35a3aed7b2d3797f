//! JSON schemas for automata, machines and labeled Markov chains.
//!
//! Guards are conjunction strings (`"r1 & !g2"`, `"true"`); rewards and
//! probabilities are exact rationals written as integers, decimal strings
//! (`"0.4"`) or fraction strings (`"1/3"`).

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::automata::{
    Alphabet, AutomatonKind, Guard, GuardedTransition, MachineTransition, MealyMachine,
    SpecAutomaton,
};
use crate::error::{Error, Result};
use crate::stochastic::MarkovChain;

#[derive(Serialize, Deserialize)]
pub struct AutomatonJson {
    pub variables: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<AutomatonTransitionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub priorities: Option<BTreeMap<String, u32>>,
    pub kind: String,
}

#[derive(Serialize, Deserialize)]
pub struct AutomatonTransitionJson {
    pub from: String,
    pub guard: String,
    pub to: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reward: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
pub struct MachineJson {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<MachineTransitionJson>,
}

#[derive(Serialize, Deserialize)]
pub struct MachineTransitionJson {
    pub from: String,
    pub guard: String,
    pub to: String,
    pub output: String,
}

#[derive(Serialize, Deserialize)]
pub struct ChainJson {
    pub variables: Vec<String>,
    pub states: Vec<ChainStateJson>,
    pub initial: String,
}

#[derive(Serialize, Deserialize)]
pub struct ChainStateJson {
    pub id: String,
    pub label: Vec<String>,
    pub next: Vec<ChainEdgeJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ChainEdgeJson {
    pub to: String,
    pub prob: serde_json::Value,
}

/// Parses an exact rational from `"a/b"`, a decimal string, or an integer.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::InputDomain(format!("bad rational '{text}'")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::InputDomain(format!("bad rational '{text}'")))?;
        if d == 0 {
            return Err(Error::InputDomain(format!("zero denominator in '{text}'")));
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') { -1 } else { 1 };
        let i: i64 = if int_part.is_empty() || int_part == "-" {
            0
        } else {
            int_part
                .parse()
                .map_err(|_| Error::InputDomain(format!("bad decimal '{text}'")))?
        };
        if frac_part.len() > 15 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::InputDomain(format!("bad decimal '{text}'")));
        }
        let scale = 10i64.pow(frac_part.len() as u32);
        let f: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().unwrap() };
        return Ok(Rational64::new(i * scale + sign * f, scale));
    }
    let n: i64 = t.parse().map_err(|_| Error::InputDomain(format!("bad rational '{text}'")))?;
    Ok(Rational64::from_integer(n))
}

fn rational_from_value(v: &serde_json::Value) -> Result<Rational64> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational64::from_integer(i))
            } else {
                // Non-integer JSON numbers go through their shortest decimal
                // representation.
                parse_rational(&n.to_string())
            }
        }
        other => Err(Error::InputDomain(format!("expected a rational, got {other}"))),
    }
}

fn state_index(states: &[String], name: &str) -> Result<usize> {
    states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::InputDomain(format!("unknown state '{name}'")))
}

pub fn automaton_from_json(text: &str) -> Result<SpecAutomaton> {
    let parsed: AutomatonJson = serde_json::from_str(text)?;
    let alphabet = Alphabet::new(parsed.variables.clone())?;
    let kind = match parsed.kind.as_str() {
        "safety" => AutomatonKind::Safety,
        "parity" => AutomatonKind::Parity,
        "meanpayoff" => AutomatonKind::MeanPayoff,
        other => return Err(Error::InputDomain(format!("unknown automaton kind '{other}'"))),
    };
    let initial = state_index(&parsed.states, &parsed.initial)?;
    let mut transitions = Vec::with_capacity(parsed.transitions.len());
    for t in &parsed.transitions {
        transitions.push(GuardedTransition {
            from: state_index(&parsed.states, &t.from)?,
            guard: Guard::parse(&t.guard, &alphabet)?,
            to: state_index(&parsed.states, &t.to)?,
            reward: t.reward.as_ref().map(rational_from_value).transpose()?,
        });
    }
    let priority = parsed
        .priorities
        .as_ref()
        .map(|p| {
            parsed
                .states
                .iter()
                .map(|s| {
                    p.get(s).copied().ok_or_else(|| {
                        Error::InputDomain(format!("missing priority for state '{s}'"))
                    })
                })
                .collect::<Result<Vec<u32>>>()
        })
        .transpose()?;
    SpecAutomaton::from_guarded(alphabet, parsed.states, initial, &transitions, priority, kind)
}

pub fn automaton_to_json(a: &SpecAutomaton) -> String {
    let alphabet = a.alphabet();
    let mut transitions = Vec::new();
    for s in 0..a.num_states() {
        // Group letters by (target, reward) to emit compact guards.
        let mut groups: BTreeMap<(usize, String), Vec<crate::automata::Letter>> = BTreeMap::new();
        for l in alphabet.letters() {
            let to = a.step(s, l);
            let reward = a.reward_of(s, l).unwrap_or_else(Rational64::zero).to_string();
            groups.entry((to, reward)).or_default().push(l);
        }
        for ((to, reward), letters) in groups {
            for l in letters {
                transitions.push(AutomatonTransitionJson {
                    from: a.state_name(s).to_string(),
                    guard: alphabet.format_letter(l),
                    to: a.state_name(to).to_string(),
                    reward: a.has_rewards().then(|| serde_json::Value::String(reward.clone())),
                });
            }
        }
    }
    let priorities = a.priorities().map(|p| {
        a.state_names()
            .iter()
            .zip(p)
            .map(|(s, &v)| (s.clone(), v))
            .collect::<BTreeMap<_, _>>()
    });
    let json = AutomatonJson {
        variables: alphabet.variables().to_vec(),
        states: a.state_names().to_vec(),
        initial: a.state_name(a.initial()).to_string(),
        transitions,
        priorities,
        kind: a.kind().as_str().to_string(),
    };
    serde_json::to_string_pretty(&json).expect("automaton serialization")
}

pub fn machine_from_json(text: &str) -> Result<MealyMachine> {
    let parsed: MachineJson = serde_json::from_str(text)?;
    let inputs = Alphabet::new(parsed.inputs.clone())?;
    let outputs = Alphabet::new(parsed.outputs.clone())?;
    let initial = state_index(&parsed.states, &parsed.initial)?;
    let mut transitions = Vec::with_capacity(parsed.transitions.len());
    for t in &parsed.transitions {
        let output_guard = Guard::parse(&t.output, &outputs)?;
        if !output_guard.is_total_assignment(&outputs) {
            return Err(Error::InputDomain(format!(
                "output '{}' does not determine every output variable",
                t.output
            )));
        }
        let output = output_guard.expand(&outputs)[0];
        transitions.push(MachineTransition {
            from: state_index(&parsed.states, &t.from)?,
            guard: Guard::parse(&t.guard, &inputs)?,
            to: state_index(&parsed.states, &t.to)?,
            output,
        });
    }
    MealyMachine::from_guarded(inputs, outputs, parsed.states, initial, &transitions)
}

pub fn machine_to_json(m: &MealyMachine) -> String {
    let inputs = m.input_alphabet();
    let outputs = m.output_alphabet();
    let mut transitions = Vec::new();
    for s in 0..m.num_states() {
        for l in inputs.letters() {
            transitions.push(MachineTransitionJson {
                from: m.state_names()[s].clone(),
                guard: inputs.format_letter(l),
                to: m.state_names()[m.step(s, l)].clone(),
                output: outputs.format_letter(m.output(s, l)),
            });
        }
    }
    let json = MachineJson {
        inputs: inputs.variables().to_vec(),
        outputs: outputs.variables().to_vec(),
        states: m.state_names().to_vec(),
        initial: m.state_names()[m.initial()].clone(),
        transitions,
    };
    serde_json::to_string_pretty(&json).expect("machine serialization")
}

pub fn chain_from_json(text: &str) -> Result<MarkovChain> {
    let parsed: ChainJson = serde_json::from_str(text)?;
    let alphabet = Alphabet::new(parsed.variables.clone())?;
    let names: Vec<String> = parsed.states.iter().map(|s| s.id.clone()).collect();
    let initial = state_index(&names, &parsed.initial)?;
    let mut labels = Vec::with_capacity(names.len());
    let mut delta = Vec::with_capacity(names.len());
    for s in &parsed.states {
        labels.push(alphabet.letter(&s.label)?);
        let mut row = Vec::with_capacity(s.next.len());
        for e in &s.next {
            let p = rational_from_value(&e.prob)?;
            row.push((state_index(&names, &e.to)?, crate::automata::rational_to_f64(p)));
        }
        delta.push(row);
    }
    Ok(MarkovChain::new(names, initial, delta).with_labels(alphabet, labels))
}

pub fn chain_to_json(c: &MarkovChain) -> Result<String> {
    let alphabet = c
        .label_alphabet()
        .ok_or_else(|| Error::Precondition("chain is not labeled".into()))?;
    let states: Vec<ChainStateJson> = (0..c.num_states())
        .map(|s| ChainStateJson {
            id: c.state_name(s).to_string(),
            label: alphabet
                .letter_vars(c.label_of(s).unwrap())
                .into_iter()
                .map(String::from)
                .collect(),
            next: c
                .successors(s)
                .iter()
                .map(|&(t, p)| ChainEdgeJson {
                    to: c.state_name(t).to_string(),
                    prob: serde_json::Value::String(format!("{p}")),
                })
                .collect(),
        })
        .collect();
    let json = ChainJson {
        variables: alphabet.variables().to_vec(),
        states,
        initial: c.state_name(c.initial()).to_string(),
    };
    Ok(serde_json::to_string_pretty(&json).expect("chain serialization"))
}
