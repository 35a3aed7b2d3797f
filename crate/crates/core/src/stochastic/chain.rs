//! Finite labeled Markov chains: recurrence classes, Cesàro long-run
//! frequencies, mean payoff with bottom propagation, almost-sure parity.

use crate::automata::{Alphabet, Letter};
use crate::error::{Error, Result, Violation};
use crate::linalg::Lu;

use super::{strongly_connected_components, DISTRIBUTION_TOL};

/// A state reward: a finite value or bottom (`None`).
pub type Reward = Option<f64>;

#[derive(Debug, Clone)]
pub struct MarkovChain {
    names: Vec<String>,
    initial: usize,
    delta: Vec<Vec<(usize, f64)>>,
    label: Option<(Alphabet, Vec<Letter>)>,
    reward: Option<Vec<Reward>>,
    priority: Option<Vec<u32>>,
}

impl MarkovChain {
    pub fn new(
        names: Vec<String>,
        initial: usize,
        delta: Vec<Vec<(usize, f64)>>,
    ) -> MarkovChain {
        MarkovChain { names, initial, delta, label: None, reward: None, priority: None }
    }

    pub fn with_labels(mut self, alphabet: Alphabet, labels: Vec<Letter>) -> MarkovChain {
        self.label = Some((alphabet, labels));
        self
    }

    pub fn with_rewards(mut self, rewards: Vec<Reward>) -> MarkovChain {
        self.reward = Some(rewards);
        self
    }

    pub fn with_priorities(mut self, priorities: Vec<u32>) -> MarkovChain {
        self.priority = Some(priorities);
        self
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

    pub fn successors(&self, s: usize) -> &[(usize, f64)] {
        &self.delta[s]
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

    pub fn priorities(&self) -> Option<&[u32]> {
        self.priority.as_deref()
    }

    /// Distribution, closure and labeling checks. Empty iff valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (s, row) in self.delta.iter().enumerate() {
            if row.is_empty() {
                out.push(Violation::Stochastic {
                    state: self.names[s].clone(),
                    detail: "no outgoing edge".into(),
                });
                continue;
            }
            let sum: f64 = row.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > DISTRIBUTION_TOL {
                out.push(Violation::Stochastic {
                    state: self.names[s].clone(),
                    detail: format!("probabilities sum to {sum}"),
                });
            }
            if row.iter().any(|&(_, p)| p <= 0.0) {
                out.push(Violation::Stochastic {
                    state: self.names[s].clone(),
                    detail: "non-positive edge probability".into(),
                });
            }
        }
        if let Some((alphabet, labels)) = &self.label {
            // Deterministic and complete: the successor labels of a state are
            // pairwise distinct and cover the whole alphabet.
            for (s, row) in self.delta.iter().enumerate() {
                let mut seen = vec![false; alphabet.len()];
                for &(t, _) in row {
                    let l = labels[t];
                    if seen[l.index()] {
                        out.push(Violation::Labeling {
                            state: self.names[s].clone(),
                            detail: format!(
                                "two successors labeled {}",
                                alphabet.format_letter_set(l)
                            ),
                        });
                    }
                    seen[l.index()] = true;
                }
                if seen.iter().any(|&x| !x) {
                    out.push(Violation::Labeling {
                        state: self.names[s].clone(),
                        detail: "successor labels do not cover the alphabet".into(),
                    });
                }
            }
        }
        out
    }

    /// States reachable from `from` (including `from`).
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(s) = stack.pop() {
            for &(t, _) in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// The transient states and the recurrence classes (bottom strongly
    /// connected components) of the chain.
    pub fn recurrence_classes(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let n = self.num_states();
        let comps = strongly_connected_components(n, &vec![true; n], |s| {
            self.delta[s].iter().map(|&(t, _)| t).collect()
        });
        let mut comp_of = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for &s in c {
                comp_of[s] = i;
            }
        }
        let mut classes = Vec::new();
        let mut transient = Vec::new();
        for (i, c) in comps.iter().enumerate() {
            let closed = c
                .iter()
                .all(|&s| self.delta[s].iter().all(|&(t, _)| comp_of[t] == i));
            if closed {
                classes.push(c.clone());
            } else {
                transient.extend(c.iter().copied());
            }
        }
        transient.sort_unstable();
        (transient, classes)
    }

    /// Cesàro-limit occupation frequencies from `from`: absorption
    /// probabilities into each recurrent class composed with the class's
    /// stationary distribution. The result sums to 1; transient states have
    /// frequency 0.
    pub fn longrun_frequencies(&self, from: usize) -> Result<Vec<f64>> {
        let n = self.num_states();
        let reachable = self.reachable_from(from);
        let (_, classes) = self.recurrence_classes();
        let reachable_classes: Vec<&Vec<usize>> =
            classes.iter().filter(|c| reachable[c[0]]).collect();

        // Absorption probabilities from `from` into each reachable class.
        let mut class_of = vec![usize::MAX; n];
        for (k, c) in reachable_classes.iter().enumerate() {
            for &s in c.iter() {
                class_of[s] = k;
            }
        }
        let transient_states: Vec<usize> = (0..n)
            .filter(|&s| reachable[s] && class_of[s] == usize::MAX)
            .collect();
        let absorb = if transient_states.is_empty() {
            let mut a = vec![0.0; reachable_classes.len()];
            a[class_of[from]] = 1.0;
            a
        } else if class_of[from] != usize::MAX {
            let mut a = vec![0.0; reachable_classes.len()];
            a[class_of[from]] = 1.0;
            a
        } else {
            let t = transient_states.len();
            let mut tindex = vec![usize::MAX; n];
            for (i, &s) in transient_states.iter().enumerate() {
                tindex[s] = i;
            }
            // (I - Q) a_k = b_k over transient states.
            let mut m = vec![0.0; t * t];
            for (i, &s) in transient_states.iter().enumerate() {
                m[i * t + i] = 1.0;
                for &(succ, p) in &self.delta[s] {
                    if tindex[succ] != usize::MAX {
                        m[i * t + tindex[succ]] -= p;
                    }
                }
            }
            let lu = Lu::factor(m, t)?;
            let mut a = vec![0.0; reachable_classes.len()];
            for (k, _) in reachable_classes.iter().enumerate() {
                let mut b = vec![0.0; t];
                for (i, &s) in transient_states.iter().enumerate() {
                    for &(succ, p) in &self.delta[s] {
                        if class_of[succ] == k {
                            b[i] += p;
                        }
                    }
                }
                let x = lu.solve(&b);
                a[k] = x[tindex[from]];
            }
            a
        };

        // Stationary distribution inside each class: pi P = pi, sum pi = 1.
        let mut freq = vec![0.0; n];
        for (k, class) in reachable_classes.iter().enumerate() {
            if absorb[k] <= 0.0 {
                continue;
            }
            let m = class.len();
            let mut cindex = vec![usize::MAX; n];
            for (i, &s) in class.iter().enumerate() {
                cindex[s] = i;
            }
            // Rows 0..m-1: (P^T - I) pi = 0, with the last row replaced by
            // the normalization sum(pi) = 1.
            let mut mat = vec![0.0; m * m];
            for (j, &s) in class.iter().enumerate() {
                for &(succ, p) in &self.delta[s] {
                    let i = cindex[succ];
                    debug_assert_ne!(i, usize::MAX);
                    mat[i * m + j] += p;
                }
            }
            for i in 0..m {
                mat[i * m + i] -= 1.0;
            }
            for j in 0..m {
                mat[(m - 1) * m + j] = 1.0;
            }
            let mut b = vec![0.0; m];
            b[m - 1] = 1.0;
            let pi = Lu::factor(mat, m)?.solve(&b);
            for (i, &s) in class.iter().enumerate() {
                freq[s] = absorb[k] * pi[i];
            }
        }
        Ok(freq)
    }

    /// Expected mean payoff from `from`: the frequency-weighted sum of the
    /// state rewards. Bottom if any state with a bottom reward is reachable
    /// from `from` (the chain is complete, so a reachable violation has
    /// positive probability).
    pub fn mean_payoff(&self, from: usize) -> Result<Reward> {
        let rewards = self
            .reward
            .as_ref()
            .ok_or_else(|| Error::Precondition("chain has no rewards".into()))?;
        let reachable = self.reachable_from(from);
        if (0..self.num_states()).any(|s| reachable[s] && rewards[s].is_none()) {
            return Ok(None);
        }
        let freq = self.longrun_frequencies(from)?;
        let mut v = 0.0;
        for s in 0..self.num_states() {
            if freq[s] != 0.0 {
                v += freq[s] * rewards[s].unwrap();
            }
        }
        Ok(Some(v))
    }

    /// True iff every recurrence class reachable from `from` has an even
    /// minimum priority.
    pub fn parity_almost_sure(&self, from: usize) -> Result<bool> {
        let priorities = self
            .priority
            .as_ref()
            .ok_or_else(|| Error::Precondition("chain has no priorities".into()))?;
        let reachable = self.reachable_from(from);
        let (_, classes) = self.recurrence_classes();
        for class in &classes {
            if reachable[class[0]] {
                let min = class.iter().map(|&s| priorities[s]).min().unwrap();
                if min % 2 == 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_cycle() -> MarkovChain {
        MarkovChain::new(
            vec!["s0".into(), "s1".into()],
            0,
            vec![vec![(1, 1.0)], vec![(0, 1.0)]],
        )
    }

    #[test]
    fn recurrence_of_absorbing_chain() {
        let mc = MarkovChain::new(
            vec!["s0".into(), "s1".into()],
            0,
            vec![vec![(1, 1.0)], vec![(1, 1.0)]],
        );
        let (transient, classes) = mc.recurrence_classes();
        assert_eq!(transient, vec![0]);
        assert_eq!(classes, vec![vec![1]]);
    }

    #[test]
    fn single_cycle_is_one_class() {
        let (transient, classes) = two_state_cycle().recurrence_classes();
        assert!(transient.is_empty());
        assert_eq!(classes, vec![vec![0, 1]]);
    }

    #[test]
    fn frequencies_of_symmetric_cycle() {
        let freq = two_state_cycle().longrun_frequencies(0).unwrap();
        assert!((freq[0] - 0.5).abs() < 1e-12);
        assert!((freq[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn absorbing_reward_five() {
        let mc = MarkovChain::new(
            vec!["a".into(), "b".into()],
            0,
            vec![vec![(1, 1.0)], vec![(1, 1.0)]],
        )
        .with_rewards(vec![Some(0.0), Some(5.0)]);
        assert_eq!(mc.mean_payoff(0).unwrap(), Some(5.0));
    }

    #[test]
    fn bottom_propagates_when_reachable() {
        let mc = MarkovChain::new(
            vec!["a".into(), "b".into(), "c".into()],
            0,
            vec![vec![(1, 0.5), (2, 0.5)], vec![(1, 1.0)], vec![(2, 1.0)]],
        )
        .with_rewards(vec![Some(0.0), None, Some(1.0)]);
        assert_eq!(mc.mean_payoff(0).unwrap(), None);
        // From c, the bottom state is unreachable.
        assert_eq!(mc.mean_payoff(2).unwrap(), Some(1.0));
    }

    #[test]
    fn parity_of_reachable_classes_only() {
        let mc = MarkovChain::new(
            vec!["a".into(), "odd".into(), "even".into()],
            0,
            vec![vec![(2, 1.0)], vec![(1, 1.0)], vec![(2, 1.0)]],
        )
        .with_priorities(vec![0, 1, 0]);
        assert!(mc.parity_almost_sure(0).unwrap());
        assert!(!mc.parity_almost_sure(1).unwrap());
    }

    #[test]
    fn validate_catches_bad_rows() {
        let mc = MarkovChain::new(vec!["a".into()], 0, vec![vec![(0, 0.7)]]);
        assert!(!mc.validate().is_empty());
    }
}
