//! DOT export of automata, machines and stochastic models.

use std::fmt::Write as _;

use crate::automata::{MealyMachine, SpecAutomaton};
use crate::stochastic::{MarkovChain, Mdp, Transitions};

fn quote(s: &str) -> String {
    s.replace('"', "\\\"")
}

pub fn automaton_to_dot(a: &SpecAutomaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    for s in 0..a.num_states() {
        let mut label = a.state_name(s).to_string();
        if let Some(p) = a.priority_of(s) {
            let _ = write!(label, "\\np={p}");
        }
        let _ = writeln!(out, "  n{s} [label=\"{}\"];", quote(&label));
    }
    let _ = writeln!(out, "  init [shape=point]; init -> n{};", a.initial());
    let alphabet = a.alphabet();
    for s in 0..a.num_states() {
        for l in alphabet.letters() {
            let to = a.step(s, l);
            let mut label = alphabet.format_letter_set(l);
            if let Some(r) = a.reward_of(s, l) {
                let _ = write!(label, " ({r})");
            }
            let _ = writeln!(out, "  n{s} -> n{to} [label=\"{}\"];", quote(&label));
        }
    }
    out.push_str("}\n");
    out
}

/// Machines also annotate behaviorally equivalent state pairs found by
/// partition refinement (merge candidates, for documentation only).
pub fn machine_to_dot(m: &MealyMachine) -> String {
    let mut out = String::from("digraph machine {\n  rankdir=LR;\n  node [shape=circle];\n");
    let classes = m.equivalence_classes();
    for s in 0..m.num_states() {
        let _ = writeln!(out, "  n{s} [label=\"{}\"];", quote(&m.state_names()[s]));
    }
    let _ = writeln!(out, "  init [shape=point]; init -> n{};", m.initial());
    let inputs = m.input_alphabet();
    let outputs = m.output_alphabet();
    for s in 0..m.num_states() {
        for l in inputs.letters() {
            let label = format!(
                "{}/{}",
                inputs.format_letter_set(l),
                outputs.format_letter_set(m.output(s, l))
            );
            let _ = writeln!(out, "  n{s} -> n{} [label=\"{}\"];", m.step(s, l), quote(&label));
        }
    }
    for s in 0..m.num_states() {
        for t in s + 1..m.num_states() {
            if classes[s] == classes[t] {
                let _ = writeln!(
                    out,
                    "  // merge candidate: {} ~ {}",
                    m.state_names()[s],
                    m.state_names()[t]
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn chain_to_dot(c: &MarkovChain) -> String {
    let mut out = String::from("digraph chain {\n  rankdir=LR;\n  node [shape=circle];\n");
    for s in 0..c.num_states() {
        let mut label = c.state_name(s).to_string();
        if let Some(r) = c.rewards().map(|r| r[s]) {
            match r {
                Some(v) => {
                    let _ = write!(label, "\\nr={v}");
                }
                None => label.push_str("\\nr=bottom"),
            }
        }
        if let Some(p) = c.priorities().map(|p| p[s]) {
            let _ = write!(label, "\\np={p}");
        }
        let _ = writeln!(out, "  n{s} [label=\"{}\"];", quote(&label));
    }
    let _ = writeln!(out, "  init [shape=point]; init -> n{};", c.initial());
    for s in 0..c.num_states() {
        for &(t, p) in c.successors(s) {
            let _ = writeln!(out, "  n{s} -> n{t} [label=\"{p:.6}\"];");
        }
    }
    out.push_str("}\n");
    out
}

pub fn mdp_to_dot(g: &Mdp) -> String {
    let mut out = String::from("digraph mdp {\n  rankdir=LR;\n");
    for s in 0..g.num_states() {
        let shape = if g.is_player1(s) { "box" } else { "circle" };
        let mut label = g.state_name(s).to_string();
        if let Some(r) = g.reward_of(s) {
            match r {
                Some(v) => {
                    let _ = write!(label, "\\nr={v}");
                }
                None => label.push_str("\\nr=bottom"),
            }
        }
        if let Some(p) = g.priority_of(s) {
            let _ = write!(label, "\\np={p}");
        }
        let _ = writeln!(out, "  n{s} [shape={shape}, label=\"{}\"];", quote(&label));
    }
    let _ = writeln!(out, "  init [shape=point]; init -> n{};", g.initial());
    for s in 0..g.num_states() {
        match g.transitions(s) {
            Transitions::Choices(c) => {
                for &t in c {
                    let _ = writeln!(out, "  n{s} -> n{t};");
                }
            }
            Transitions::Distribution(d) => {
                for &(t, p) in d {
                    let _ = writeln!(out, "  n{s} -> n{t} [label=\"{p:.6}\"];");
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::trivial_qualitative;

    #[test]
    fn dot_outputs_are_wellformed() {
        let alphabet = crate::automata::Alphabet::new(["x"]).unwrap();
        let a = trivial_qualitative(&alphabet);
        let dot = automaton_to_dot(&a);
        assert!(dot.starts_with("digraph"));
        assert!(dot.ends_with("}\n"));

        let chain = MarkovChain::new(vec!["s".into()], 0, vec![vec![(0, 1.0)]]);
        assert!(chain_to_dot(&chain).contains("init -> n0"));
    }
}
