//! Markov decision processes: player-1 states with edge choices and
//! probabilistic states with fixed distributions.

use crate::automata::{Alphabet, Letter};
use crate::error::{Error, Result, Violation};

use super::chain::{MarkovChain, Reward};
use super::{strongly_connected_components, DISTRIBUTION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Player1,
    Probabilistic,
}

/// Outgoing transition structure of one state.
#[derive(Debug, Clone)]
pub enum Transitions {
    /// Player-1 choices: the successor set `E(s)`.
    Choices(Vec<usize>),
    /// Probabilistic successors with their probabilities; the edge set is
    /// exactly the support.
    Distribution(Vec<(usize, f64)>),
}

impl Transitions {
    pub fn successors(&self) -> Vec<usize> {
        match self {
            Transitions::Choices(c) => c.clone(),
            Transitions::Distribution(d) => d.iter().map(|&(t, _)| t).collect(),
        }
    }
}

/// A pure memoryless strategy: one chosen successor per player-1 state.
/// States not in the map are unconstrained (useful for partial strategies
/// over sub-MDPs); `choice` returns an error if consulted there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PureMemorylessStrategy {
    choice: std::collections::BTreeMap<usize, usize>,
}

impl PureMemorylessStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, state: usize, successor: usize) {
        self.choice.insert(state, successor);
    }

    pub fn get(&self, state: usize) -> Option<usize> {
        self.choice.get(&state).copied()
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choice.iter().map(|(&s, &t)| (s, t))
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }
}

/// A randomized memoryless strategy: a distribution over successors per
/// player-1 state.
#[derive(Debug, Clone, Default)]
pub struct RandomizedStrategy {
    choice: std::collections::BTreeMap<usize, Vec<(usize, f64)>>,
}

impl RandomizedStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, state: usize, distribution: Vec<(usize, f64)>) {
        self.choice.insert(state, distribution);
    }

    pub fn get(&self, state: usize) -> Option<&[(usize, f64)]> {
        self.choice.get(&state).map(|v| v.as_slice())
    }
}

#[derive(Debug, Clone)]
pub struct Mdp {
    names: Vec<String>,
    initial: usize,
    transitions: Vec<Transitions>,
    label: Option<(Alphabet, Vec<Letter>)>,
    reward: Option<Vec<Reward>>,
    priority: Option<Vec<u32>>,
}

impl Mdp {
    pub fn new(names: Vec<String>, initial: usize, transitions: Vec<Transitions>) -> Mdp {
        Mdp { names, initial, transitions, label: None, reward: None, priority: None }
    }

    pub fn with_labels(mut self, alphabet: Alphabet, labels: Vec<Letter>) -> Mdp {
        self.label = Some((alphabet, labels));
        self
    }

    pub fn with_rewards(mut self, rewards: Vec<Reward>) -> Mdp {
        self.reward = Some(rewards);
        self
    }

    pub fn with_priorities(mut self, priorities: Vec<u32>) -> Mdp {
        self.priority = Some(priorities);
        self
    }

    /// Views a Markov chain as an MDP without player-1 states.
    pub fn from_chain(chain: &MarkovChain) -> Mdp {
        let transitions = (0..chain.num_states())
            .map(|s| Transitions::Distribution(chain.successors(s).to_vec()))
            .collect();
        let mut mdp = Mdp::new(chain.state_names().to_vec(), chain.initial(), transitions);
        if let Some(a) = chain.label_alphabet() {
            let labels = (0..chain.num_states()).map(|s| chain.label_of(s).unwrap()).collect();
            mdp = mdp.with_labels(a.clone(), labels);
        }
        if let Some(r) = chain.rewards() {
            mdp = mdp.with_rewards(r.to_vec());
        }
        if let Some(p) = chain.priorities() {
            mdp = mdp.with_priorities(p.to_vec());
        }
        mdp
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn kind(&self, s: usize) -> StateKind {
        match self.transitions[s] {
            Transitions::Choices(_) => StateKind::Player1,
            Transitions::Distribution(_) => StateKind::Probabilistic,
        }
    }

    pub fn is_player1(&self, s: usize) -> bool {
        self.kind(s) == StateKind::Player1
    }

    pub fn transitions(&self, s: usize) -> &Transitions {
        &self.transitions[s]
    }

    pub fn successors(&self, s: usize) -> Vec<usize> {
        self.transitions[s].successors()
    }

    pub fn player1_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&s| self.is_player1(s)).collect()
    }

    pub fn label_alphabet(&self) -> Option<&Alphabet> {
        self.label.as_ref().map(|(a, _)| a)
    }

    pub fn label_of(&self, s: usize) -> Option<Letter> {
        self.label.as_ref().map(|(_, l)| l[s])
    }

    pub fn rewards(&self) -> Option<&[Reward]> {
        self.reward.as_deref()
    }

    pub fn reward_of(&self, s: usize) -> Option<Reward> {
        self.reward.as_ref().map(|r| r[s])
    }

    pub fn priorities(&self) -> Option<&[u32]> {
        self.priority.as_deref()
    }

    pub fn priority_of(&self, s: usize) -> Option<u32> {
        self.priority.as_ref().map(|p| p[s])
    }

    pub fn max_priority(&self) -> Option<u32> {
        self.priority.as_ref().map(|p| p.iter().copied().max().unwrap_or(0))
    }

    /// Distribution and closure checks. Empty iff valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (s, t) in self.transitions.iter().enumerate() {
            match t {
                Transitions::Choices(c) => {
                    if c.is_empty() {
                        out.push(Violation::Stochastic {
                            state: self.names[s].clone(),
                            detail: "player-1 state without outgoing edge".into(),
                        });
                    }
                }
                Transitions::Distribution(d) => {
                    if d.is_empty() {
                        out.push(Violation::Stochastic {
                            state: self.names[s].clone(),
                            detail: "probabilistic state without outgoing edge".into(),
                        });
                        continue;
                    }
                    let sum: f64 = d.iter().map(|(_, p)| p).sum();
                    if (sum - 1.0).abs() > DISTRIBUTION_TOL {
                        out.push(Violation::Stochastic {
                            state: self.names[s].clone(),
                            detail: format!("probabilities sum to {sum}"),
                        });
                    }
                    if d.iter().any(|&(_, p)| p <= 0.0) {
                        out.push(Violation::Stochastic {
                            state: self.names[s].clone(),
                            detail: "non-positive edge probability".into(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Restricts the MDP to follow the choices of a pure memoryless
    /// strategy: player-1 states become probability-1 edges. Labels,
    /// rewards and priorities are carried over.
    pub fn fix_strategy(&self, pi: &PureMemorylessStrategy) -> Result<MarkovChain> {
        let delta = (0..self.num_states())
            .map(|s| match &self.transitions[s] {
                Transitions::Distribution(d) => Ok(d.clone()),
                Transitions::Choices(c) => {
                    let t = pi.get(s).ok_or_else(|| {
                        Error::Precondition(format!(
                            "strategy undefined at player-1 state '{}'",
                            self.names[s]
                        ))
                    })?;
                    if !c.contains(&t) {
                        return Err(Error::Precondition(format!(
                            "strategy at '{}' picks a non-edge successor",
                            self.names[s]
                        )));
                    }
                    Ok(vec![(t, 1.0)])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.build_chain(delta))
    }

    /// Restricts the MDP to follow a randomized memoryless strategy.
    pub fn fix_randomized(&self, sigma: &RandomizedStrategy) -> Result<MarkovChain> {
        let delta = (0..self.num_states())
            .map(|s| match &self.transitions[s] {
                Transitions::Distribution(d) => Ok(d.clone()),
                Transitions::Choices(c) => {
                    let dist = sigma.get(s).ok_or_else(|| {
                        Error::Precondition(format!(
                            "strategy undefined at player-1 state '{}'",
                            self.names[s]
                        ))
                    })?;
                    for &(t, _) in dist {
                        if !c.contains(&t) {
                            return Err(Error::Precondition(format!(
                                "strategy at '{}' picks a non-edge successor",
                                self.names[s]
                            )));
                        }
                    }
                    Ok(dist.to_vec())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.build_chain(delta))
    }

    fn build_chain(&self, delta: Vec<Vec<(usize, f64)>>) -> MarkovChain {
        let mut chain = MarkovChain::new(self.names.clone(), self.initial, delta);
        if let Some((a, l)) = &self.label {
            chain = chain.with_labels(a.clone(), l.clone());
        }
        if let Some(r) = &self.reward {
            chain = chain.with_rewards(r.clone());
        }
        if let Some(p) = &self.priority {
            chain = chain.with_priorities(p.clone());
        }
        chain
    }

    /// The maximal end components of the MDP: pairwise disjoint sets, each
    /// δ-closed and strongly connected in the restricted sub-game, covering
    /// every end component.
    pub fn mec_decomposition(&self) -> Vec<Vec<usize>> {
        self.mec_decomposition_on(&vec![true; self.num_states()])
    }

    /// Maximal end components of the sub-MDP induced by `allowed`.
    ///
    /// Standard iterated SCC-and-trim: remove probabilistic states whose
    /// support leaves the candidate set and states without an internal
    /// successor, split into SCCs, repeat until each candidate stabilizes.
    pub fn mec_decomposition_on(&self, allowed: &[bool]) -> Vec<Vec<usize>> {
        let n = self.num_states();
        let mut result: Vec<Vec<usize>> = Vec::new();
        let initial: Vec<usize> = (0..n).filter(|&s| allowed[s]).collect();
        let mut work: Vec<Vec<usize>> = vec![initial];
        while let Some(candidate) = work.pop() {
            let mut inside = vec![false; n];
            for &s in &candidate {
                inside[s] = true;
            }
            // Trim until stable.
            loop {
                let mut removed = false;
                for &s in &candidate {
                    if !inside[s] {
                        continue;
                    }
                    let ok = match &self.transitions[s] {
                        Transitions::Distribution(d) => d.iter().all(|&(t, _)| inside[t]),
                        Transitions::Choices(c) => c.iter().any(|&t| inside[t]),
                    };
                    if !ok {
                        inside[s] = false;
                        removed = true;
                    }
                }
                if !removed {
                    break;
                }
            }
            let remaining: Vec<usize> = candidate.iter().copied().filter(|&s| inside[s]).collect();
            if remaining.is_empty() {
                continue;
            }
            let comps = strongly_connected_components(n, &inside, |s| {
                self.transitions[s]
                    .successors()
                    .into_iter()
                    .filter(|&t| inside[t])
                    .collect()
            });
            if comps.len() == 1 && comps[0].len() == remaining.len() {
                // Single SCC covering the trimmed candidate. A singleton
                // needs an internal self-loop to let plays stay forever.
                let c = &comps[0];
                if c.len() == 1 && !self.transitions[c[0]].successors().contains(&c[0]) {
                    continue;
                }
                result.push(c.clone());
            } else {
                // Each SCC is a smaller candidate; re-trimming on the next
                // round resolves singletons without self-loops.
                work.extend(comps);
            }
        }
        result.sort();
        result
    }

    /// The uniform strategy inside an end component: every player-1 state
    /// of `u` plays all internal edges uniformly at random. In the fixed
    /// chain, `u` is a single closed recurrence class.
    pub fn uniform_ec_strategy(&self, u: &[usize]) -> Result<RandomizedStrategy> {
        if !self.is_end_component(u) {
            return Err(Error::Precondition("set is not an end component".into()));
        }
        let inside = |s: usize| u.contains(&s);
        let mut sigma = RandomizedStrategy::new();
        for &s in u {
            if let Transitions::Choices(c) = &self.transitions[s] {
                let internal: Vec<usize> = c.iter().copied().filter(|&t| inside(t)).collect();
                let p = 1.0 / internal.len() as f64;
                sigma.set(s, internal.into_iter().map(|t| (t, p)).collect());
            }
        }
        Ok(sigma)
    }

    /// Checks the end component conditions for `u`: δ-closed and strongly
    /// connected (with at least one internal edge per state).
    pub fn is_end_component(&self, u: &[usize]) -> bool {
        if u.is_empty() {
            return false;
        }
        let n = self.num_states();
        let mut inside = vec![false; n];
        for &s in u {
            if s >= n {
                return false;
            }
            inside[s] = true;
        }
        for &s in u {
            match &self.transitions[s] {
                Transitions::Distribution(d) => {
                    if !d.iter().all(|&(t, _)| inside[t]) {
                        return false;
                    }
                }
                Transitions::Choices(c) => {
                    if !c.iter().any(|&t| inside[t]) {
                        return false;
                    }
                }
            }
        }
        if u.len() == 1 {
            return self.transitions[u[0]].successors().contains(&u[0]);
        }
        let comps = strongly_connected_components(n, &inside, |s| {
            self.transitions[s].successors().into_iter().filter(|&t| inside[t]).collect()
        });
        comps.len() == 1 && comps[0].len() == u.len()
    }

    /// The sub-MDP induced by `keep`, with player-1 edges filtered to the
    /// kept set. Returns the new MDP and the old-to-new state index map.
    /// Fails if a kept probabilistic state has support outside `keep` or a
    /// kept player-1 state loses all edges.
    pub fn restrict(&self, keep: &[bool]) -> Result<(Mdp, Vec<Option<usize>>)> {
        let n = self.num_states();
        let mut map: Vec<Option<usize>> = vec![None; n];
        let mut names = Vec::new();
        let mut kept_states = Vec::new();
        for s in 0..n {
            if keep[s] {
                map[s] = Some(names.len());
                names.push(self.names[s].clone());
                kept_states.push(s);
            }
        }
        let mut transitions = Vec::with_capacity(kept_states.len());
        for &s in &kept_states {
            let t = match &self.transitions[s] {
                Transitions::Distribution(d) => {
                    for &(t, _) in d {
                        if !keep[t] {
                            return Err(Error::Precondition(format!(
                                "probabilistic state '{}' has support outside the restriction",
                                self.names[s]
                            )));
                        }
                    }
                    Transitions::Distribution(d.iter().map(|&(t, p)| (map[t].unwrap(), p)).collect())
                }
                Transitions::Choices(c) => {
                    let filtered: Vec<usize> =
                        c.iter().filter(|&&t| keep[t]).map(|&t| map[t].unwrap()).collect();
                    if filtered.is_empty() {
                        return Err(Error::Precondition(format!(
                            "player-1 state '{}' loses all edges in the restriction",
                            self.names[s]
                        )));
                    }
                    Transitions::Choices(filtered)
                }
            };
            transitions.push(t);
        }
        let initial = map[self.initial].unwrap_or(0);
        let mut mdp = Mdp::new(names, initial, transitions);
        if let Some((a, l)) = &self.label {
            mdp = mdp.with_labels(a.clone(), kept_states.iter().map(|&s| l[s]).collect());
        }
        if let Some(r) = &self.reward {
            mdp = mdp.with_rewards(kept_states.iter().map(|&s| r[s]).collect());
        }
        if let Some(p) = &self.priority {
            mdp = mdp.with_priorities(kept_states.iter().map(|&s| p[s]).collect());
        }
        Ok((mdp, map))
    }
}
