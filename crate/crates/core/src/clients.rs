//! Benchmark generator: n-client request/grant specifications with a
//! mutual-exclusion (and optionally response-bound) safety automaton and an
//! independent per-step request distribution.

use std::time::Instant;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::automata::{Alphabet, AutomatonKind, GuardedTransition, Guard, Letter, SpecAutomaton};
use crate::error::{Error, Result};
use crate::stochastic::MarkovChain;
use crate::synthesis::{self, SynthesisMode};

/// Parameters of one generated instance.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub clients: usize,
    /// Request probability per client, in (0, 1).
    pub probabilities: Vec<Rational64>,
    /// Every request must be granted within this many steps (the request
    /// step counts); `None` drops the response constraints.
    pub response_bound: Option<usize>,
}

impl BenchmarkSpec {
    /// The skewed distribution of the experiments: the last client requests
    /// with probability 0.3 and each earlier client adds 0.1.
    pub fn skewed(clients: usize, response_bound: Option<usize>) -> BenchmarkSpec {
        let probabilities = (0..clients)
            .map(|i| Rational64::new(3, 10) + Rational64::new((clients - 1 - i) as i64, 10))
            .collect();
        BenchmarkSpec { clients, probabilities, response_bound }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clients == 0 {
            return Err(Error::Precondition("at least one client".into()));
        }
        if self.probabilities.len() != self.clients {
            return Err(Error::Precondition("one probability per client".into()));
        }
        for p in &self.probabilities {
            if *p <= Rational64::zero() || *p >= Rational64::one() {
                return Err(Error::Precondition(format!(
                    "request probability {p} outside (0,1)"
                )));
            }
        }
        if let Some(k) = self.response_bound {
            if k == 0 {
                return Err(Error::Precondition("response bound must be positive".into()));
            }
        }
        Ok(())
    }
}

fn request_name(i: usize) -> String {
    format!("r{}", i + 1)
}

fn grant_name(i: usize) -> String {
    format!("g{}", i + 1)
}

/// The per-client request/grant reward automaton over the joint alphabet:
/// reward 1 when the client is served or idle, 0 while a request is
/// pending.
fn client_reward_automaton(joint: &Alphabet, i: usize) -> Result<SpecAutomaton> {
    let r = request_name(i);
    let g = grant_name(i);
    let parse = |t: String| Guard::parse(&t, joint);
    let one = Rational64::one();
    let zero = Rational64::zero();
    SpecAutomaton::from_guarded(
        joint.clone(),
        vec![format!("idle{}", i + 1), format!("pend{}", i + 1)],
        0,
        &[
            GuardedTransition { from: 0, guard: parse(g.clone())?, to: 0, reward: Some(one) },
            GuardedTransition {
                from: 0,
                guard: parse(format!("!{r} & !{g}"))?,
                to: 0,
                reward: Some(one),
            },
            GuardedTransition {
                from: 0,
                guard: parse(format!("{r} & !{g}"))?,
                to: 1,
                reward: Some(zero),
            },
            GuardedTransition { from: 1, guard: parse(format!("!{g}"))?, to: 1, reward: Some(zero) },
            GuardedTransition { from: 1, guard: parse(g)?, to: 0, reward: Some(one) },
        ],
        None,
        AutomatonKind::MeanPayoff,
    )
}

/// Mutual exclusion: at most one grant per step. Two states; the bad state
/// is absorbing with priority 1.
fn mutual_exclusion(joint: &Alphabet, clients: usize) -> SpecAutomaton {
    let grant_indices: Vec<usize> = (0..clients)
        .map(|i| joint.var_index(&grant_name(i)).expect("grant variable"))
        .collect();
    let letters = joint.len();
    let mut delta = vec![vec![0usize; letters]; 2];
    for li in 0..letters {
        let letter = Letter(li as u32);
        let grants = grant_indices.iter().filter(|&&v| letter.contains(v)).count();
        delta[0][li] = if grants >= 2 { 1 } else { 0 };
        delta[1][li] = 1;
    }
    SpecAutomaton::from_dense(
        joint.clone(),
        vec!["ok".into(), "bad".into()],
        0,
        delta,
        Some(vec![0, 1]),
        None,
        AutomatonKind::Safety,
    )
}

/// Response bound for one client: a pending request must be granted within
/// `k` steps of being issued (the issuing step counts). Ages 0..k-1 plus an
/// absorbing bad state.
fn response_automaton(joint: &Alphabet, i: usize, k: usize) -> SpecAutomaton {
    let r = joint.var_index(&request_name(i)).expect("request variable");
    let g = joint.var_index(&grant_name(i)).expect("grant variable");
    let letters = joint.len();
    let bad = k; // states 0..k-1 are ages, k is bad
    let mut delta = vec![vec![0usize; letters]; k + 1];
    for li in 0..letters {
        let letter = Letter(li as u32);
        let granted = letter.contains(g);
        let requested = letter.contains(r);
        for age in 0..k {
            delta[age][li] = if granted {
                0
            } else if age == 0 {
                if requested {
                    if k == 1 {
                        bad
                    } else {
                        1
                    }
                } else {
                    0
                }
            } else if age == k - 1 {
                bad
            } else {
                age + 1
            };
        }
        delta[bad][li] = bad;
    }
    let mut names: Vec<String> = (0..k).map(|a| format!("age{}_{}", a, i + 1)).collect();
    names.push(format!("late{}", i + 1));
    let mut priorities = vec![0; k];
    priorities.push(1);
    SpecAutomaton::from_dense(joint.clone(), names, 0, delta, Some(priorities), None, AutomatonKind::Safety)
}

/// The generated instance: qualitative safety spec, quantitative spec (sum
/// of the per-client reward automata), and the labeled input chain.
pub fn gen_clients(
    spec: &BenchmarkSpec,
) -> Result<(SpecAutomaton, SpecAutomaton, MarkovChain)> {
    spec.validate()?;
    let n = spec.clients;
    let mut vars: Vec<String> = Vec::with_capacity(2 * n);
    for i in 0..n {
        vars.push(request_name(i));
        vars.push(grant_name(i));
    }
    let joint = Alphabet::new(vars)?;

    let mut quantitative = client_reward_automaton(&joint, 0)?;
    for i in 1..n {
        quantitative = quantitative.product_sum_rewards(&client_reward_automaton(&joint, i)?)?;
    }

    let mut qualitative = mutual_exclusion(&joint, n);
    if let Some(k) = spec.response_bound {
        for i in 0..n {
            qualitative = qualitative.product_safety(&response_automaton(&joint, i, k))?;
        }
    }

    let env = request_chain(&spec.probabilities)?;
    Ok((qualitative, quantitative, env))
}

/// The labeled input chain of independent per-step requests: one state per
/// input letter, every state carrying the same product distribution.
pub fn request_chain(probabilities: &[Rational64]) -> Result<MarkovChain> {
    let n = probabilities.len();
    let input_alphabet = Alphabet::new((0..n).map(request_name))?;
    let letters = input_alphabet.len();
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(letters);
    for li in 0..letters {
        let letter = Letter(li as u32);
        let mut p = Rational64::one();
        for (i, prob) in probabilities.iter().enumerate() {
            let var = input_alphabet.var_index(&request_name(i)).unwrap();
            p *= if letter.contains(var) { *prob } else { Rational64::one() - *prob };
        }
        row.push((li, crate::automata::rational_to_f64(p)));
    }
    let names: Vec<String> =
        input_alphabet.letters().map(|l| input_alphabet.format_letter_set(l)).collect();
    let labels: Vec<Letter> = input_alphabet.letters().collect();
    let delta = vec![row; letters];
    Ok(MarkovChain::new(names, 0, delta).with_labels(input_alphabet, labels))
}

/// One row of the benchmark table.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub clients: usize,
    pub spec_states: usize,
    pub mdp_states: usize,
    pub machine_states: Option<usize>,
    pub value: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

/// Runs the generator and synthesizer for each client count; per-row
/// failures are reported in the row and the run continues. Rows run in
/// parallel and are assembled by index.
pub fn bench(from: usize, to: usize, response: bool) -> Vec<BenchRow> {
    let counts: Vec<usize> = (from..=to).collect();
    let mut rows: Vec<Option<BenchRow>> = vec![None; counts.len()];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for &n in &counts {
            handles.push(scope.spawn(move || bench_row(n, response)));
        }
        for (i, h) in handles.into_iter().enumerate() {
            rows[i] = Some(h.join().unwrap_or_else(|_| BenchRow {
                clients: counts[i],
                spec_states: 0,
                mdp_states: 0,
                machine_states: None,
                value: None,
                seconds: 0.0,
                error: Some("worker panicked".into()),
            }));
        }
    });
    rows.into_iter().map(|r| r.unwrap()).collect()
}

fn bench_row(n: usize, response: bool) -> BenchRow {
    let start = Instant::now();
    let spec = BenchmarkSpec::skewed(n, response.then_some(n));
    let run = || -> Result<(usize, usize, usize, f64)> {
        let (a, b, env) = gen_clients(&spec)?;
        let spec_states = a.product_spec(&b)?.num_states();
        let syn = synthesis::build_synthesis_mdp(&a, &b, &env)?;
        let mdp_states = syn.mdp.num_states();
        let result = synthesis::synthesize(&a, &b, &env, SynthesisMode::Epsilon(0.05))?;
        match result {
            synthesis::SynthesisResult::OptimalMemoryless { machine, value } => {
                Ok((spec_states, mdp_states, machine.num_states(), value))
            }
            synthesis::SynthesisResult::EpsilonOptimal { machine, value, .. } => {
                Ok((spec_states, mdp_states, machine.num_states(), value))
            }
            synthesis::SynthesisResult::Unrealizable { reason } => {
                Err(Error::Precondition(format!("unrealizable: {reason}")))
            }
            synthesis::SynthesisResult::InfiniteMemoryRequired { .. } => {
                Err(Error::Internal("unexpected infinite-memory result in ε mode".into()))
            }
        }
    };
    match run() {
        Ok((spec_states, mdp_states, machine_states, value)) => BenchRow {
            clients: n,
            spec_states,
            mdp_states,
            machine_states: Some(machine_states),
            value: Some(value),
            seconds: start.elapsed().as_secs_f64(),
            error: None,
        },
        Err(e) => BenchRow {
            clients: n,
            spec_states: 0,
            mdp_states: 0,
            machine_states: None,
            value: None,
            seconds: start.elapsed().as_secs_f64(),
            error: Some(e.to_string()),
        },
    }
}

/// Aligned text table of benchmark rows.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>7} {:>12} {:>10} {:>14} {:>8} {:>9}\n",
        "clients", "spec-states", "mdp-states", "machine-states", "value", "seconds"
    ));
    for r in rows {
        if let Some(err) = &r.error {
            out.push_str(&format!("{:>7} failed: {err}\n", r.clients));
            continue;
        }
        out.push_str(&format!(
            "{:>7} {:>12} {:>10} {:>14} {:>8} {:>9.2}\n",
            r.clients,
            r.spec_states,
            r.mdp_states,
            r.machine_states.map(|m| m.to_string()).unwrap_or_default(),
            r.value.map(|v| format!("{v:.3}")).unwrap_or_default(),
            r.seconds
        ));
    }
    out
}

/// CSV rendering with the same numbers as the text table.
pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("clients,spec_states,mdp_states,machine_states,value,seconds\n");
    for r in rows {
        if r.error.is_some() {
            out.push_str(&format!("{},,,,,\n", r.clients));
            continue;
        }
        out.push_str(&format!(
            "{},{},{},{},{},{:.2}\n",
            r.clients,
            r.spec_states,
            r.mdp_states,
            r.machine_states.map(|m| m.to_string()).unwrap_or_default(),
            r.value.map(|v| format!("{v:.3}")).unwrap_or_default(),
            r.seconds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skewed_probabilities() {
        let s = BenchmarkSpec::skewed(3, None);
        assert_eq!(s.probabilities, vec![
            Rational64::new(5, 10),
            Rational64::new(4, 10),
            Rational64::new(3, 10),
        ]);
    }

    #[test]
    fn generated_instances_validate() {
        for n in 1..=3 {
            let (a, b, env) = gen_clients(&BenchmarkSpec::skewed(n, None)).unwrap();
            assert!(a.validate().is_empty());
            assert!(b.validate().is_empty());
            assert!(env.validate().is_empty());
            assert_eq!(b.num_states(), 1 << n);
            assert_eq!(env.num_states(), 1 << n);
        }
    }

    #[test]
    fn response_instances_validate() {
        let (a, b, env) = gen_clients(&BenchmarkSpec::skewed(2, Some(2))).unwrap();
        assert!(a.validate().is_empty());
        assert!(b.validate().is_empty());
        assert!(env.validate().is_empty());
    }

    #[test]
    fn alphabet_limit_is_enforced() {
        let spec = BenchmarkSpec {
            clients: 9,
            probabilities: vec![Rational64::new(1, 2); 9],
            response_bound: None,
        };
        assert!(matches!(gen_clients(&spec), Err(Error::AlphabetTooLarge { .. })));
    }
}
