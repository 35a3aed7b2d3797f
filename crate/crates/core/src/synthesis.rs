//! Synthesis: build the MDP whose player-1 choices are the system's output
//! letters, solve it for the mean-payoff (parity) objective, and extract
//! Mealy machines from the resulting strategies.

use std::collections::HashMap;

use crate::automata::{rational_to_f64, Alphabet, AutomatonKind, Letter, MealyMachine, SpecAutomaton};
use crate::error::{Error, Result};
use crate::measure;
use crate::mpp::{
    self, epsilon_strategy, has_optimal_memoryless, mdp_mean_payoff, mpp_value,
    optimal_counter_strategy, sure_avoid, CounterStrategy, Schedule,
};
use crate::stochastic::{MarkovChain, Mdp, PureMemorylessStrategy, Transitions};

/// The synthesis MDP: a half-speed game alternating between probabilistic
/// input-selection states and player-1 output-choice states.
///
/// Probabilistic states are "system" states tagged with the last output
/// letter (so a strategy's choice can be read off the successor state);
/// player-1 states are canonical intermediate states, one per class of
/// (system state, pending input) pairs with identical successor, reward and
/// priority behavior. Rewards sit on probabilistic states (the reward of
/// the transition that entered them); priorities come from the qualitative
/// spec. In the safety case, violating states are absorbing with bottom
/// rewards.
#[derive(Debug, Clone)]
pub struct SynthesisMdp {
    pub mdp: Mdp,
    pub input_alphabet: Alphabet,
    pub output_alphabet: Alphabet,
    /// Per probabilistic (phase-0) state: the successor player-1 state per
    /// input letter index. `None` for player-1 states and for absorbing
    /// violation states.
    input_map: Vec<Option<Vec<usize>>>,
    /// Per player-1 (phase-1) state: (output letter, successor) pairs in
    /// output-letter order.
    output_map: Vec<Option<Vec<(Letter, usize)>>>,
    /// Per phase-0 state: the output letter it is tagged with.
    output_tag: Vec<Option<Letter>>,
    safety_case: bool,
}

impl SynthesisMdp {
    pub fn output_tag(&self, state: usize) -> Option<Letter> {
        self.output_tag[state]
    }

    pub fn is_phase0(&self, state: usize) -> bool {
        self.output_tag[state].is_some()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Phase0Key {
    qa: usize,
    qb: usize,
    gamma: u32,
    env: usize,
}

struct Phase0Registry {
    by_key: HashMap<Phase0Key, Vec<usize>>,
    reward: Vec<Option<f64>>,
    keys: Vec<Phase0Key>,
}

impl Phase0Registry {
    fn new() -> Self {
        Phase0Registry { by_key: HashMap::new(), reward: Vec::new(), keys: Vec::new() }
    }

    /// Finds or creates the state for `key` entered with reward `entry`.
    /// A state whose reward is still unset adopts the entry reward; states
    /// are split only when two different entry rewards genuinely collide.
    fn get_or_create(&mut self, key: Phase0Key, entry: Option<f64>, created: &mut Vec<usize>) -> usize {
        let ids = self.by_key.entry(key).or_default();
        for &id in ids.iter() {
            match (self.reward[id], entry) {
                (_, None) => return id,
                (None, Some(_)) => {
                    self.reward[id] = entry;
                    return id;
                }
                (Some(r), Some(e)) if (r - e).abs() <= 1e-12 => return id,
                _ => {}
            }
        }
        let id = self.reward.len();
        ids.push(id);
        self.reward.push(entry);
        self.keys.push(key);
        created.push(id);
        id
    }
}

/// Builds the synthesis MDP from a qualitative spec `a`, a quantitative
/// spec `b` (both over the joint alphabet) and a labeled input chain.
/// When every state of the input chain has the same distribution over input
/// letters (an i.i.d. assumption), the chain state is folded away.
pub fn build_synthesis_mdp(
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
) -> Result<SynthesisMdp> {
    if !a.kind().is_qualitative() {
        return Err(Error::Precondition("qualitative spec must be safety or parity".into()));
    }
    let priorities = a
        .priorities()
        .ok_or_else(|| Error::Precondition("qualitative spec lacks priorities".into()))?;
    if !b.has_rewards() {
        return Err(Error::Precondition("quantitative spec lacks rewards".into()));
    }
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch("specs have different alphabets".into()));
    }
    let joint = a.alphabet().clone();
    let input_alphabet = env
        .label_alphabet()
        .ok_or_else(|| Error::AlphabetMismatch("input chain is not labeled".into()))?
        .clone();
    if !input_alphabet.is_sub_alphabet_of(&joint) {
        return Err(Error::AlphabetMismatch(
            "input variables are not part of the joint alphabet".into(),
        ));
    }
    let env_violations = env.validate();
    if !env_violations.is_empty() {
        return Err(Error::Validation(env_violations));
    }
    let output_vars: Vec<String> = joint
        .variables()
        .iter()
        .filter(|v| input_alphabet.var_index(v).is_none())
        .cloned()
        .collect();
    let output_alphabet = Alphabet::new(output_vars)?;
    let safety_case = a.kind() == AutomatonKind::Safety;

    // Fold the chain state when the input process is i.i.d.
    let iid = env_is_iid(env, &input_alphabet);
    let env_of = |key_env: usize| key_env; // clarity alias

    // Joint letters per (input, output) pair, precomputed.
    let mut joint_letter = vec![vec![Letter::EMPTY; output_alphabet.len()]; input_alphabet.len()];
    for i in input_alphabet.letters() {
        for o in output_alphabet.letters() {
            joint_letter[i.index()][o.index()] =
                input_alphabet.combine_into(i, &output_alphabet, o, &joint)?;
        }
    }

    let mut registry = Phase0Registry::new();
    let mut created = Vec::new();
    let initial_key = Phase0Key {
        qa: a.initial(),
        qb: b.initial(),
        gamma: 0,
        env: if iid { usize::MAX } else { env.initial() },
    };
    let initial = registry.get_or_create(initial_key, None, &mut created);
    debug_assert_eq!(initial, 0);

    // Player-1 states, keyed by their behavioral signature.
    type Signature = (Vec<(usize, u64)>, u32);
    let mut phase1_index: HashMap<Signature, usize> = HashMap::new();
    // Global state list: phase-0 states get even slots as discovered; all
    // states share one id space managed through `slots`.
    #[derive(Clone)]
    enum Slot {
        Phase0(usize),  // registry id
        Phase1(usize),  // signature index
    }
    let mut slots: Vec<Slot> = vec![Slot::Phase0(0)];
    let mut phase0_slot: Vec<usize> = vec![0]; // registry id -> slot
    let mut phase1_slots: Vec<usize> = Vec::new(); // signature index -> slot
    let mut phase1_succ: Vec<Vec<(Letter, usize)>> = Vec::new(); // per signature: (output, registry id)
    let mut phase1_priority: Vec<u32> = Vec::new();

    // Per phase-0 registry id: input letter -> phase-1 signature index.
    let mut phase0_inputs: Vec<Option<Vec<usize>>> = vec![None];
    let mut phase0_env_rows: Vec<Option<Vec<(usize, f64)>>> = vec![None];

    let mut work: Vec<usize> = vec![0]; // registry ids to expand
    let mut cursor = 0usize;
    while cursor < work.len() {
        let p0 = work[cursor];
        cursor += 1;
        let key = registry.keys[p0];
        let prio = priorities[key.qa];
        if safety_case && prio == 1 {
            // Violation state: absorbing, bottom reward; not expanded.
            continue;
        }

        // Successor env rows: (env state or MAX, probability, input letter).
        let rows: Vec<(usize, f64, Letter)> = if iid {
            let s0 = env.initial();
            env.successors(s0)
                .iter()
                .map(|&(t, p)| (usize::MAX, p, env.label_of(t).unwrap()))
                .collect()
        } else {
            env.successors(key.env)
                .iter()
                .map(|&(t, p)| (env_of(t), p, env.label_of(t).unwrap()))
                .collect()
        };

        let mut input_to_sig: Vec<usize> = vec![usize::MAX; input_alphabet.len()];
        let mut env_row: Vec<(usize, f64)> = Vec::new();
        for &(env_next, p, input) in &rows {
            // Build the phase-1 signature for (this state, input).
            let mut succ: Vec<(usize, u64)> = Vec::with_capacity(output_alphabet.len());
            for gamma in output_alphabet.letters() {
                let letter = joint_letter[input.index()][gamma.index()];
                let qa2 = a.step(key.qa, letter);
                let qb2 = b.step(key.qb, letter);
                let reward = rational_to_f64(b.reward_of(key.qb, letter).unwrap());
                let succ_key = Phase0Key { qa: qa2, qb: qb2, gamma: gamma.0, env: env_next };
                let mut created_now = Vec::new();
                let succ_id = registry.get_or_create(succ_key, Some(reward), &mut created_now);
                for id in created_now {
                    phase0_slot.push(usize::MAX); // assigned below
                    phase0_inputs.push(None);
                    phase0_env_rows.push(None);
                    work.push(id);
                    let slot = slots.len();
                    slots.push(Slot::Phase0(id));
                    phase0_slot[id] = slot;
                }
                succ.push((succ_id, reward.to_bits()));
            }
            let signature: Signature = (succ.clone(), prio);
            let sig_index = *phase1_index.entry(signature).or_insert_with(|| {
                let idx = phase1_succ.len();
                phase1_succ.push(
                    output_alphabet
                        .letters()
                        .zip(succ.iter())
                        .map(|(gamma, &(succ_id, _))| (gamma, succ_id))
                        .collect(),
                );
                phase1_priority.push(prio);
                let slot = slots.len();
                slots.push(Slot::Phase1(idx));
                phase1_slots.push(slot);
                idx
            });
            input_to_sig[input.index()] = sig_index;
            // Accumulate probability (several inputs can share a class).
            match env_row.iter_mut().find(|(sig, _)| *sig == sig_index) {
                Some((_, q)) => *q += p,
                None => env_row.push((sig_index, p)),
            }
        }
        phase0_inputs[p0] = Some(input_to_sig);
        phase0_env_rows[p0] = Some(env_row);
    }

    // Assemble the MDP over the slot id space.
    let n = slots.len();
    let mut names = vec![String::new(); n];
    let mut transitions: Vec<Option<Transitions>> = vec![None; n];
    let mut rewards: Vec<Option<f64>> = vec![Some(0.0); n];
    let mut prios: Vec<u32> = vec![0; n];
    let mut input_map: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut output_map: Vec<Option<Vec<(Letter, usize)>>> = vec![None; n];
    let mut output_tag: Vec<Option<Letter>> = vec![None; n];

    for (slot, kind) in slots.iter().enumerate() {
        match kind {
            Slot::Phase0(id) => {
                let key = registry.keys[*id];
                let prio = priorities[key.qa];
                prios[slot] = prio;
                output_tag[slot] = Some(Letter(key.gamma));
                let env_part = if iid {
                    String::new()
                } else {
                    format!("|{}", env.state_name(key.env))
                };
                names[slot] = format!(
                    "({},{}{}/{})",
                    a.state_name(key.qa),
                    b.state_name(key.qb),
                    env_part,
                    output_alphabet.format_letter_set(Letter(key.gamma)),
                );
                rewards[slot] = Some(registry.reward[*id].unwrap_or(0.0));
                if safety_case && prio == 1 {
                    rewards[slot] = None;
                    transitions[slot] = Some(Transitions::Distribution(vec![(slot, 1.0)]));
                    continue;
                }
                let row = phase0_env_rows[*id]
                    .as_ref()
                    .expect("expanded phase-0 state")
                    .iter()
                    .map(|&(sig, p)| (phase1_slots[sig], p))
                    .collect();
                transitions[slot] = Some(Transitions::Distribution(row));
                input_map[slot] = Some(
                    phase0_inputs[*id]
                        .as_ref()
                        .unwrap()
                        .iter()
                        .map(|&sig| phase1_slots[sig])
                        .collect(),
                );
            }
            Slot::Phase1(idx) => {
                prios[slot] = phase1_priority[*idx];
                names[slot] = format!("choice{idx}");
                let succ: Vec<(Letter, usize)> = phase1_succ[*idx]
                    .iter()
                    .map(|&(gamma, reg_id)| (gamma, phase0_slot[reg_id]))
                    .collect();
                transitions[slot] =
                    Some(Transitions::Choices(succ.iter().map(|&(_, t)| t).collect()));
                output_map[slot] = Some(succ);
            }
        }
    }

    let mdp = Mdp::new(
        names,
        phase0_slot[0],
        transitions.into_iter().map(|t| t.unwrap()).collect(),
    )
    .with_rewards(rewards)
    .with_priorities(prios);

    Ok(SynthesisMdp {
        mdp,
        input_alphabet,
        output_alphabet,
        input_map,
        output_map,
        output_tag,
        safety_case,
    })
}

/// True iff every state of a labeled chain has the same distribution over
/// successor labels.
fn env_is_iid(env: &MarkovChain, alphabet: &Alphabet) -> bool {
    let dist_of = |s: usize| -> Vec<f64> {
        let mut d = vec![0.0; alphabet.len()];
        for &(t, p) in env.successors(s) {
            if let Some(l) = env.label_of(t) {
                d[l.index()] += p;
            }
        }
        d
    };
    let first = dist_of(0);
    (1..env.num_states()).all(|s| {
        dist_of(s)
            .iter()
            .zip(&first)
            .all(|(a, b)| (a - b).abs() <= 1e-12)
    })
}

/// Extracts the Mealy machine of a pure memoryless strategy on the
/// synthesis MDP: machine states are the reachable probabilistic states;
/// on input `σ` the machine moves to the strategy's successor and emits
/// that state's output tag.
pub fn extract_mealy_memoryless(
    syn: &SynthesisMdp,
    pi: &PureMemorylessStrategy,
) -> Result<MealyMachine> {
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    index.insert(syn.mdp.initial(), 0);
    order.push(syn.mdp.initial());
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut lambda: Vec<Vec<Letter>> = Vec::new();
    let mut cursor = 0usize;
    while cursor < order.len() {
        let u = order[cursor];
        cursor += 1;
        let inputs = syn.input_map[u].as_ref().ok_or_else(|| {
            Error::Precondition(format!(
                "strategy reaches the violating state '{}'",
                syn.mdp.state_name(u)
            ))
        })?;
        let mut drow = Vec::with_capacity(inputs.len());
        let mut lrow = Vec::with_capacity(inputs.len());
        for &t in inputs {
            let v = pi.get(t).ok_or_else(|| {
                Error::Precondition(format!(
                    "strategy undefined at choice state '{}'",
                    syn.mdp.state_name(t)
                ))
            })?;
            let gamma = syn.output_tag[v].ok_or_else(|| {
                Error::Internal("strategy successor is not a system state".into())
            })?;
            let next = order.len();
            let id = *index.entry(v).or_insert(next);
            if id == next {
                order.push(v);
            }
            drow.push(id);
            lrow.push(gamma);
        }
        delta.push(drow);
        lambda.push(lrow);
    }
    let names: Vec<String> = order.iter().map(|&s| syn.mdp.state_name(s).to_string()).collect();
    Ok(MealyMachine::from_dense(
        syn.input_alphabet.clone(),
        syn.output_alphabet.clone(),
        names,
        0,
        delta,
        lambda,
    ))
}

/// Combines two machines over the same state space into a counter machine:
/// the first `n` steps of each round follow `m_reach`, the next `l` steps
/// follow `m_gain`. The machines must have identical state spaces (as
/// produced by [`extract_mealy_memoryless`] from strategies on one MDP).
pub fn combine_with_counter(
    m_reach: &MealyMachine,
    m_gain: &MealyMachine,
    n: usize,
    l: usize,
) -> Result<MealyMachine> {
    if m_reach.input_alphabet() != m_gain.input_alphabet()
        || m_reach.output_alphabet() != m_gain.output_alphabet()
    {
        return Err(Error::AlphabetMismatch("counter machines have different alphabets".into()));
    }
    if m_reach.num_states() != m_gain.num_states() || m_reach.state_names() != m_gain.state_names()
    {
        return Err(Error::Precondition(
            "counter combination needs machines over the same state space".into(),
        ));
    }
    if n == 0 || l == 0 {
        return Err(Error::Precondition("counter stages must be nonempty".into()));
    }
    let period = n + l;
    let inputs = m_reach.input_alphabet().len();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    index.insert((m_reach.initial(), 0), 0);
    order.push((m_reach.initial(), 0));
    let mut delta = Vec::new();
    let mut lambda = Vec::new();
    let mut cursor = 0;
    while cursor < order.len() {
        let (u, c) = order[cursor];
        cursor += 1;
        let active = if c < n { m_reach } else { m_gain };
        let mut drow = Vec::with_capacity(inputs);
        let mut lrow = Vec::with_capacity(inputs);
        for li in 0..inputs {
            let input = Letter(li as u32);
            let next = (active.step(u, input), (c + 1) % period);
            let fresh = order.len();
            let id = *index.entry(next).or_insert(fresh);
            if id == fresh {
                order.push(next);
            }
            drow.push(id);
            lrow.push(active.output(u, input));
        }
        delta.push(drow);
        lambda.push(lrow);
    }
    let names: Vec<String> = order
        .iter()
        .map(|&(u, c)| format!("{}#{}", m_reach.state_names()[u], c))
        .collect();
    Ok(MealyMachine::from_dense(
        m_reach.input_alphabet().clone(),
        m_reach.output_alphabet().clone(),
        names,
        0,
        delta,
        lambda,
    ))
}

/// How [`synthesize`] should treat specifications without a finite-state
/// optimum: report the counter strategy (`Exact`) or build an ε-optimal
/// finite machine (`Epsilon`).
#[derive(Debug, Clone, Copy)]
pub enum SynthesisMode {
    Exact,
    Epsilon(f64),
}

/// Descriptor of an optimal infinite-memory strategy: travel choices plus
/// an adaptive counter strategy per committed end component.
#[derive(Debug, Clone)]
pub struct CounterStrategyDescriptor {
    pub travel: PureMemorylessStrategy,
    pub components: Vec<(Vec<usize>, CounterStrategy)>,
}

#[derive(Debug)]
pub enum SynthesisResult {
    Unrealizable { reason: String },
    OptimalMemoryless { machine: MealyMachine, value: f64 },
    EpsilonOptimal { machine: MealyMachine, value: f64, epsilon: f64, declared_optimum: f64 },
    InfiniteMemoryRequired { descriptor: CounterStrategyDescriptor, optimum: f64 },
}

impl SynthesisResult {
    pub fn machine(&self) -> Option<&MealyMachine> {
        match self {
            SynthesisResult::OptimalMemoryless { machine, .. } => Some(machine),
            SynthesisResult::EpsilonOptimal { machine, .. } => Some(machine),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            SynthesisResult::OptimalMemoryless { value, .. } => Some(*value),
            SynthesisResult::EpsilonOptimal { value, .. } => Some(*value),
            SynthesisResult::InfiniteMemoryRequired { optimum, .. } => Some(*optimum),
            SynthesisResult::Unrealizable { .. } => None,
        }
    }
}

/// Synthesizes a machine that satisfies `a` with probability 1 under the
/// input assumption and maximizes the expected `b`-value. Safety specs go
/// through the plain mean-payoff pipeline (always memoryless); parity specs
/// run the mean-payoff-parity solver and fall back to counter strategies
/// when no memoryless optimum exists.
pub fn synthesize(
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
    mode: SynthesisMode,
) -> Result<SynthesisResult> {
    synthesize_with_cancel(a, b, env, mode, &|| false)
}

/// As [`synthesize`], polling `cancelled` between pipeline phases.
pub fn synthesize_with_cancel(
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
    mode: SynthesisMode,
    cancelled: &dyn Fn() -> bool,
) -> Result<SynthesisResult> {
    if let SynthesisMode::Epsilon(e) = mode {
        if e <= 0.0 {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
    }
    let syn = build_synthesis_mdp(a, b, env)?;
    if cancelled() {
        return Err(Error::Cancelled);
    }
    if syn.safety_case {
        synthesize_safety(&syn)
    } else {
        synthesize_parity(&syn, mode, cancelled)
    }
}

fn synthesize_safety(syn: &SynthesisMdp) -> Result<SynthesisResult> {
    let g = &syn.mdp;
    let n = g.num_states();
    let rewards = g.rewards().unwrap();
    let bad: Vec<bool> = (0..n).map(|s| rewards[s].is_none()).collect();
    let (safe, _) = sure_avoid(g, &bad);
    if !safe[g.initial()] {
        return Ok(SynthesisResult::Unrealizable {
            reason: "the safety specification is violated with positive probability under every \
                     strategy"
                .into(),
        });
    }
    let (sub, map) = g.restrict(&safe)?;
    let (values, pi_sub) = mdp_mean_payoff(&sub)?;
    let mut back = vec![usize::MAX; sub.num_states()];
    for (orig, m) in map.iter().enumerate() {
        if let Some(i) = m {
            back[*i] = orig;
        }
    }
    let mut pi = PureMemorylessStrategy::new();
    for (s, t) in pi_sub.states() {
        pi.set(back[s], back[t]);
    }
    let machine = extract_mealy_memoryless(syn, &pi)?;
    let value = 2.0 * values[map[g.initial()].unwrap()];
    Ok(SynthesisResult::OptimalMemoryless { machine, value })
}

fn synthesize_parity(
    syn: &SynthesisMdp,
    mode: SynthesisMode,
    cancelled: &dyn Fn() -> bool,
) -> Result<SynthesisResult> {
    let g = &syn.mdp;
    let solution = mpp_value(g)?;
    let initial = g.initial();
    if solution.values[initial].is_bottom() {
        return Ok(SynthesisResult::Unrealizable {
            reason: "the parity specification is not satisfiable with probability 1 from the \
                     initial state"
                .into(),
        });
    }
    let optimum = 2.0 * solution.values[initial].value().unwrap();
    if cancelled() {
        return Err(Error::Cancelled);
    }

    let (memoryless, witness) = has_optimal_memoryless(g)?;
    if cancelled() {
        return Err(Error::Cancelled);
    }
    if memoryless {
        if let Some(pi) = witness {
            let machine = extract_mealy_memoryless(syn, &pi)?;
            return Ok(SynthesisResult::OptimalMemoryless { machine, value: optimum });
        }
    }

    match mode {
        SynthesisMode::Exact => {
            let mut components = Vec::new();
            for &ci in &solution.committed {
                let comp = &solution.best.components[ci];
                let cs = optimal_counter_strategy(g, &comp.states)?;
                components.push((comp.states.clone(), cs));
            }
            Ok(SynthesisResult::InfiniteMemoryRequired {
                descriptor: CounterStrategyDescriptor {
                    travel: solution.travel.clone(),
                    components,
                },
                optimum,
            })
        }
        SynthesisMode::Epsilon(epsilon) => {
            // Component strategies on the half-speed MDP need ε/2: every
            // second step carries reward zero.
            let half_eps = epsilon / 2.0;
            let mut ec_strategies: HashMap<usize, CounterStrategy> = HashMap::new();
            for &ci in &solution.committed {
                let comp = &solution.best.components[ci];
                let cs = epsilon_strategy(g, &comp.states, half_eps)?;
                ec_strategies.insert(ci, cs);
            }
            if cancelled() {
                return Err(Error::Cancelled);
            }
            let machine = stitch_epsilon_machine(syn, &solution, &ec_strategies)?;
            Ok(SynthesisResult::EpsilonOptimal {
                machine,
                value: f64::NAN, // measured by the caller against the specs
                epsilon,
                declared_optimum: optimum,
            })
        }
    }
}

/// Builds the ε-optimal machine: travel with the max-conversion reach
/// strategy; once the play enters a committed component, alternate the
/// component's reach and gain strategies with the fixed counter.
fn stitch_epsilon_machine(
    syn: &SynthesisMdp,
    solution: &mpp::MppSolution,
    ec_strategies: &HashMap<usize, CounterStrategy>,
) -> Result<MealyMachine> {
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Mode {
        Outer(usize),
        Ec(usize, usize, usize), // component, state, counter
    }
    let g = &syn.mdp;
    let mk = |state: usize| -> Mode {
        match solution.commit_component_of.get(&state) {
            Some(&ci) => Mode::Ec(ci, state, 0),
            None => Mode::Outer(state),
        }
    };
    let mut index: HashMap<Mode, usize> = HashMap::new();
    let mut order: Vec<Mode> = Vec::new();
    let initial_mode = mk(g.initial());
    index.insert(initial_mode, 0);
    order.push(initial_mode);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut lambda: Vec<Vec<Letter>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut cursor = 0;
    while cursor < order.len() {
        let mode = order[cursor];
        cursor += 1;
        let (u, label) = match mode {
            Mode::Outer(u) => (u, format!("{}", g.state_name(u))),
            Mode::Ec(ci, u, c) => (u, format!("{}@{ci}#{c}", g.state_name(u))),
        };
        names.push(label);
        let inputs = syn.input_map[u].as_ref().ok_or_else(|| {
            Error::Internal("ε-machine reached an unexpanded violation state".into())
        })?;
        let mut drow = Vec::with_capacity(inputs.len());
        let mut lrow = Vec::with_capacity(inputs.len());
        for &t in inputs {
            let (v, next_mode) = match mode {
                Mode::Outer(_) => {
                    if let Some(&ci) = solution.commit_component_of.get(&t) {
                        // The pending choice state already belongs to a
                        // committed component: enter with the counter at the
                        // start of stage 1 (the decision itself is counter
                        // step 0, the successor sits at step 1).
                        let cs = &ec_strategies[&ci];
                        let v = cs.pi_reach.get(t).ok_or_else(|| {
                            Error::Internal("component reach strategy undefined".into())
                        })?;
                        (v, Mode::Ec(ci, v, 1))
                    } else {
                        let v = solution.travel.get(t).ok_or_else(|| {
                            Error::Internal("travel strategy undefined".into())
                        })?;
                        (v, mk(v))
                    }
                }
                Mode::Ec(ci, _, c) => {
                    // The counter ticks once per MDP step and a machine step
                    // covers two: the decision happens at counter c+1, the
                    // successor system state sits at c+2.
                    let cs = &ec_strategies[&ci];
                    let Schedule::Fixed { stage1, stage2 } = cs.schedule else {
                        return Err(Error::Internal("expected fixed schedule".into()));
                    };
                    let period = stage1 + stage2;
                    let decide = (c + 1) % period;
                    let active = if decide < stage1 { &cs.pi_reach } else { &cs.pi_gain };
                    let v = active.get(t).ok_or_else(|| {
                        Error::Internal("component strategy undefined".into())
                    })?;
                    (v, Mode::Ec(ci, v, (c + 2) % period))
                }
            };
            let gamma = syn.output_tag[v]
                .ok_or_else(|| Error::Internal("successor is not a system state".into()))?;
            let fresh = order.len();
            let id = *index.entry(next_mode).or_insert(fresh);
            if id == fresh {
                order.push(next_mode);
            }
            drow.push(id);
            lrow.push(gamma);
        }
        delta.push(drow);
        lambda.push(lrow);
    }
    Ok(MealyMachine::from_dense(
        syn.input_alphabet.clone(),
        syn.output_alphabet.clone(),
        names,
        0,
        delta,
        lambda,
    ))
}

/// Measures a synthesis result against the specs it was built from and
/// fills in the exact value of ε-optimal machines.
pub fn measure_result(
    result: &mut SynthesisResult,
    a: &SpecAutomaton,
    b: &SpecAutomaton,
    env: &MarkovChain,
) -> Result<()> {
    if let SynthesisResult::EpsilonOptimal { machine, value, .. } = result {
        match measure::system_value(machine, a, b, env)? {
            measure::ValueOrBottom::Value(v) => *value = v,
            measure::ValueOrBottom::Bottom => {
                return Err(Error::Internal(
                    "ε-optimal machine violates the qualitative spec".into(),
                ));
            }
        }
    }
    Ok(())
}
