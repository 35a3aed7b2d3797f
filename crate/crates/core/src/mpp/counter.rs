//! Counter strategies inside end components: two memoryless strategies (one
//! reaching the minimum even priority, one harvesting mean payoff)
//! alternated by a step counter. Growing counters give exact optima with
//! infinite memory; fixed counters give ε-optimal finite-state strategies.

use crate::error::{Error, Result};
use crate::stochastic::{Mdp, PureMemorylessStrategy, Transitions};

use super::ec_value::ec_mean_payoff;
use super::reach::shortest_path;
use super::finite_rewards;

/// The counter discipline of a [`CounterStrategy`].
#[derive(Debug, Clone)]
pub enum Schedule {
    /// Round `i`: stage 1 runs until a minimum-priority state is reached
    /// (taking `k_i` steps), stage 2 then runs `ℓ_i >= i · k_i · β` steps
    /// with `ε_i = 1/i`. The counter is unbounded.
    Adaptive,
    /// Stage 1 runs exactly `stage1` steps, stage 2 exactly `stage2` steps,
    /// repeating forever. Finite memory of size `stage1 + stage2`.
    Fixed { stage1: usize, stage2: usize },
}

impl Schedule {
    /// Stage-2 length for round `i` after a stage 1 of `k` steps.
    pub fn stage2_len(&self, round: usize, k: usize, beta: f64) -> usize {
        match self {
            Schedule::Adaptive => {
                let lower = (round as f64 * k as f64 * beta).ceil() as usize;
                lower.max(1)
            }
            Schedule::Fixed { stage2, .. } => *stage2,
        }
    }
}

/// A strategy made of two memoryless strategies and a counter schedule:
/// `pi_reach` steers to the minimum even priority, `pi_gain` harvests mean
/// payoff, and the schedule alternates them.
#[derive(Debug, Clone)]
pub struct CounterStrategy {
    pub pi_reach: PureMemorylessStrategy,
    pub pi_gain: PureMemorylessStrategy,
    pub schedule: Schedule,
    /// Maximum absolute reward inside the component.
    pub beta: f64,
    /// The component's mean-payoff value, which the strategy attains
    /// (exactly for the adaptive schedule, within ε for fixed ones).
    pub v_star: f64,
}

/// Restricts `g` to the end component `u` and returns the sub-MDP plus the
/// back-mapping to `g`'s ids.
fn restrict_to_ec(g: &Mdp, u: &[usize]) -> Result<(Mdp, Vec<usize>)> {
    if !g.is_end_component(u) {
        return Err(Error::Precondition("set is not an end component".into()));
    }
    let mut keep = vec![false; g.num_states()];
    for &s in u {
        keep[s] = true;
    }
    let (sub, map) = g.restrict(&keep)?;
    let mut back = vec![usize::MAX; sub.num_states()];
    for (orig, m) in map.iter().enumerate() {
        if let Some(i) = m {
            back[*i] = orig;
        }
    }
    Ok((sub, back))
}

fn component_pieces(
    g: &Mdp,
    u: &[usize],
) -> Result<(Mdp, Vec<usize>, PureMemorylessStrategy, PureMemorylessStrategy, f64, f64)> {
    let priorities =
        g.priorities().ok_or_else(|| Error::Precondition("MDP has no priorities".into()))?;
    let min_priority = u.iter().map(|&s| priorities[s]).min().unwrap();
    if min_priority % 2 != 0 {
        return Err(Error::Precondition("end component has odd minimum priority".into()));
    }
    let (sub, back) = restrict_to_ec(g, u)?;
    let sub_priorities = sub.priorities().unwrap();
    let target: Vec<bool> =
        (0..sub.num_states()).map(|s| sub_priorities[s] == min_priority).collect();
    let (pi_reach, _) = shortest_path(&sub, &target)?;
    let sub_states: Vec<usize> = (0..sub.num_states()).collect();
    let (v_star, pi_gain) = ec_mean_payoff(&sub, &sub_states)?;
    let beta = finite_rewards(&sub).iter().map(|r| r.abs()).fold(0.0, f64::max);
    Ok((sub, back, pi_reach, pi_gain, v_star, beta))
}

fn map_strategy(pi: &PureMemorylessStrategy, back: &[usize]) -> PureMemorylessStrategy {
    let mut out = PureMemorylessStrategy::new();
    for (s, t) in pi.states() {
        out.set(back[s], back[t]);
    }
    out
}

/// The optimal (infinite-memory) counter strategy for the end component
/// `u` of `g`: stage 1 plays the stochastic-shortest-path strategy to the
/// minimum-priority states, stage 2 plays the mean-payoff-optimal strategy
/// with round lengths growing as `ℓ_i >= i · k_i · β`.
pub fn optimal_counter_strategy(g: &Mdp, u: &[usize]) -> Result<CounterStrategy> {
    let (_, back, pi_reach, pi_gain, v_star, beta) = component_pieces(g, u)?;
    Ok(CounterStrategy {
        pi_reach: map_strategy(&pi_reach, &back),
        pi_gain: map_strategy(&pi_gain, &back),
        schedule: Schedule::Adaptive,
        beta,
        v_star,
    })
}

/// An ε-optimal fixed-counter strategy for the end component `u` of `g`:
/// stage 1 runs `n = |u|` steps, and the stage-2 length is found by a
/// doubling search starting at `⌈n·β/ε⌉`, evaluating the finite-memory
/// strategy exactly as a Markov chain until its value is within ε of the
/// component value and the parity objective holds almost surely.
pub fn epsilon_strategy(g: &Mdp, u: &[usize], epsilon: f64) -> Result<CounterStrategy> {
    if epsilon <= 0.0 {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let (sub, back, pi_reach, pi_gain, v_star, beta) = component_pieces(g, u)?;
    let n = u.len();
    let mut stage2 = ((n as f64 * beta / epsilon).ceil() as usize).max(1);
    const CAP: usize = 1 << 24;
    loop {
        let (values, parity_ok) =
            evaluate_counter_pieces(&sub, &pi_reach, &pi_gain, n, stage2)?;
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
        if parity_ok && min_value >= v_star - epsilon + 1e-12 - 1e-12 {
            if min_value >= v_star - epsilon {
                return Ok(CounterStrategy {
                    pi_reach: map_strategy(&pi_reach, &back),
                    pi_gain: map_strategy(&pi_gain, &back),
                    schedule: Schedule::Fixed { stage1: n, stage2 },
                    beta,
                    v_star,
                });
            }
        }
        stage2 = stage2.checked_mul(2).filter(|&l| l <= CAP).ok_or_else(|| {
            Error::Internal("stage-2 doubling search exceeded the cap".into())
        })?;
    }
}

/// Exact evaluation of a fixed counter strategy on the end component `g`
/// (already restricted): the per-state mean-payoff values of the
/// (state × counter) chain, and whether the parity objective holds almost
/// surely from every state.
///
/// The chain is periodic in the counter, so instead of materializing
/// `|S| · (n+ℓ)` states, distributions are pushed through one counter
/// cycle: the recurrent behavior is read off the cycle map at counter 0.
pub fn evaluate_counter_strategy(
    g: &Mdp,
    strategy: &CounterStrategy,
) -> Result<(Vec<f64>, bool)> {
    let Schedule::Fixed { stage1, stage2 } = strategy.schedule else {
        return Err(Error::Precondition("evaluation needs a fixed schedule".into()));
    };
    evaluate_counter_pieces(g, &strategy.pi_reach, &strategy.pi_gain, stage1, stage2)
}

fn evaluate_counter_pieces(
    g: &Mdp,
    pi_reach: &PureMemorylessStrategy,
    pi_gain: &PureMemorylessStrategy,
    stage1: usize,
    stage2: usize,
) -> Result<(Vec<f64>, bool)> {
    let m = g.num_states();
    let period = stage1 + stage2;
    if period == 0 {
        return Err(Error::Precondition("empty schedule".into()));
    }
    let rewards = finite_rewards(g);
    let priorities =
        g.priorities().ok_or_else(|| Error::Precondition("MDP has no priorities".into()))?;

    // Transition matrix under a strategy (row-major, dense; components are
    // small).
    let matrix_of = |pi: &PureMemorylessStrategy| -> Result<Vec<f64>> {
        let mut p = vec![0.0; m * m];
        for s in 0..m {
            match g.transitions(s) {
                Transitions::Choices(_) => {
                    let t = pi.get(s).ok_or_else(|| {
                        Error::Precondition(format!(
                            "strategy undefined at '{}'",
                            g.state_name(s)
                        ))
                    })?;
                    p[s * m + t] = 1.0;
                }
                Transitions::Distribution(d) => {
                    for &(t, q) in d {
                        p[s * m + t] += q;
                    }
                }
            }
        }
        Ok(p)
    };
    let p_reach = matrix_of(pi_reach)?;
    let p_gain = matrix_of(pi_gain)?;

    // Cycle map T: the product of the per-counter matrices.
    let mut cycle = identity(m);
    for c in 0..period {
        let p = if c < stage1 { &p_reach } else { &p_gain };
        cycle = mat_mul(&cycle, p, m);
    }

    // Recurrence classes of the counter-0 chain (successor = positive
    // entries of the cycle map).
    let chain0 = crate::stochastic::MarkovChain::new(
        (0..m).map(|s| g.state_name(s).to_string()).collect(),
        0,
        (0..m)
            .map(|s| {
                (0..m)
                    .filter(|&t| cycle[s * m + t] > 1e-15)
                    .map(|t| (t, cycle[s * m + t]))
                    .collect()
            })
            .collect(),
    );

    // Parity: propagate each recurrence class through the counter cycle and
    // collect the minimum priority visited.
    let (_, classes) = chain0.recurrence_classes();
    let mut parity_ok = true;
    for class in &classes {
        let mut support: Vec<bool> = vec![false; m];
        for &s in class {
            support[s] = true;
        }
        let mut min_priority = class.iter().map(|&s| priorities[s]).min().unwrap();
        let mut current = support;
        for c in 0..period {
            let p = if c < stage1 { &p_reach } else { &p_gain };
            let mut next = vec![false; m];
            for s in 0..m {
                if current[s] {
                    for t in 0..m {
                        if p[s * m + t] > 0.0 {
                            next[t] = true;
                        }
                    }
                }
            }
            for (t, &inside) in next.iter().enumerate() {
                if inside {
                    min_priority = min_priority.min(priorities[t]);
                }
            }
            current = next;
        }
        if min_priority % 2 == 1 {
            parity_ok = false;
        }
    }

    // Per-start-state value: the stationary counter-0 distribution of the
    // reachable classes, pushed through the cycle accumulating expected
    // rewards.
    let mut values = vec![0.0; m];
    for start in 0..m {
        let freq0 = chain0.longrun_frequencies(start)?;
        // One pass through the cycle: expected reward at each counter.
        let mut dist = freq0;
        let mut total = 0.0;
        for c in 0..period {
            total += dist.iter().zip(&rewards).map(|(d, r)| d * r).sum::<f64>();
            let p = if c < stage1 { &p_reach } else { &p_gain };
            dist = vec_mat_mul(&dist, p, m);
        }
        values[start] = total / period as f64;
    }
    Ok((values, parity_ok))
}

fn identity(m: usize) -> Vec<f64> {
    let mut i = vec![0.0; m * m];
    for k in 0..m {
        i[k * m + k] = 1.0;
    }
    i
}

fn mat_mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            if aik != 0.0 {
                for j in 0..m {
                    c[i * m + j] += aik * b[k * m + j];
                }
            }
        }
    }
    c
}

fn vec_mat_mul(v: &[f64], p: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for s in 0..m {
        let vs = v[s];
        if vs != 0.0 {
            for t in 0..m {
                out[t] += vs * p[s * m + t];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-state EC: an even hub and an odd high-reward loop.
    fn hub_mdp() -> Mdp {
        Mdp::new(
            vec!["even".into(), "odd".into()],
            0,
            vec![
                Transitions::Choices(vec![1]),
                Transitions::Choices(vec![0, 1]),
            ],
        )
        .with_rewards(vec![Some(0.0), Some(3.0)])
        .with_priorities(vec![0, 1])
    }

    #[test]
    fn adaptive_strategy_pieces() {
        let g = hub_mdp();
        let cs = optimal_counter_strategy(&g, &[0, 1]).unwrap();
        assert!((cs.v_star - 3.0).abs() < 1e-9);
        assert!((cs.beta - 3.0).abs() < 1e-12);
        // pi_gain loops at the odd state; pi_reach heads to the even one.
        assert_eq!(cs.pi_gain.get(1), Some(1));
        assert_eq!(cs.pi_reach.get(1), Some(0));
        assert!(matches!(cs.schedule, Schedule::Adaptive));
        assert!(cs.schedule.stage2_len(3, 2, cs.beta) >= 18);
    }

    #[test]
    fn epsilon_strategy_meets_bound() {
        let g = hub_mdp();
        let eps = 0.25;
        let cs = epsilon_strategy(&g, &[0, 1], eps).unwrap();
        let (values, parity_ok) = evaluate_counter_strategy(&g, &cs).unwrap();
        assert!(parity_ok);
        for v in values {
            assert!(v >= cs.v_star - eps - 1e-9, "value {v} below 3 - {eps}");
        }
    }

    #[test]
    fn epsilon_larger_than_beta_is_cheap() {
        let g = hub_mdp();
        let cs = epsilon_strategy(&g, &[0, 1], 10.0).unwrap();
        if let Schedule::Fixed { stage2, .. } = cs.schedule {
            assert_eq!(stage2, 1);
        } else {
            panic!("expected fixed schedule");
        }
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        let g = hub_mdp();
        assert!(epsilon_strategy(&g, &[0, 1], 0.0).is_err());
    }

    #[test]
    fn rejects_odd_minimum() {
        let g = Mdp::new(
            vec!["a".into()],
            0,
            vec![Transitions::Choices(vec![0])],
        )
        .with_rewards(vec![Some(1.0)])
        .with_priorities(vec![1]);
        assert!(optimal_counter_strategy(&g, &[0]).is_err());
    }
}
