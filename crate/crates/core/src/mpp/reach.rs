//! Reachability machinery over MDPs: almost-sure reachability (Prob1E),
//! sure avoidance, and stochastic-shortest-path strategies.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RelOp, Sense};
use crate::stochastic::{Mdp, PureMemorylessStrategy, Transitions};

/// The states from which player 1 has a strategy reaching `target` with
/// probability 1 while staying inside `within`, together with a witnessing
/// memoryless strategy (defined on winning player-1 states outside the
/// target).
///
/// Standard greatest/least fixpoint: repeatedly keep the states that can
/// reach the target with positive probability without ever leaving the
/// current candidate set.
pub fn prob1e_reach(
    g: &Mdp,
    target: &[bool],
    within: &[bool],
) -> (Vec<bool>, PureMemorylessStrategy) {
    let n = g.num_states();
    let mut x: Vec<bool> = (0..n).map(|s| within[s]).collect();
    loop {
        // Least fixpoint: positive-probability reach of target while
        // remaining in x.
        let mut y: Vec<bool> = (0..n).map(|s| x[s] && target[s]).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if !x[s] || y[s] {
                    continue;
                }
                let add = match g.transitions(s) {
                    Transitions::Choices(c) => c.iter().any(|&t| y[t]),
                    Transitions::Distribution(d) => {
                        d.iter().all(|&(t, _)| x[t]) && d.iter().any(|&(t, _)| y[t])
                    }
                };
                if add {
                    y[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if y == x {
            break;
        }
        x = y;
    }

    // Strategy: BFS layers toward the target inside the winning set.
    let strategy = reach_strategy_in(g, target, &x);
    (x, strategy)
}

/// BFS-layer extraction of a reach strategy: every player-1 state picks the
/// lowest-index successor strictly closer to the target. Probabilistic
/// detours stay inside `winning`, where progress is always available, so
/// the target is reached almost surely.
fn reach_strategy_in(g: &Mdp, target: &[bool], winning: &[bool]) -> PureMemorylessStrategy {
    let n = g.num_states();
    let mut dist = vec![usize::MAX; n];
    for s in 0..n {
        if winning[s] && target[s] {
            dist[s] = 0;
        }
    }
    loop {
        let mut changed = false;
        for s in 0..n {
            if !winning[s] || dist[s] == 0 {
                continue;
            }
            let best = match g.transitions(s) {
                Transitions::Choices(c) => c
                    .iter()
                    .filter(|&&t| winning[t])
                    .map(|&t| dist[t])
                    .min()
                    .unwrap_or(usize::MAX),
                Transitions::Distribution(d) => d
                    .iter()
                    .filter(|&&(t, _)| winning[t])
                    .map(|&(t, _)| dist[t])
                    .min()
                    .unwrap_or(usize::MAX),
            };
            let candidate = best.saturating_add(1);
            if candidate < dist[s] {
                dist[s] = candidate;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut pi = PureMemorylessStrategy::new();
    for s in 0..n {
        if !winning[s] || target[s] || dist[s] == usize::MAX {
            continue;
        }
        if let Transitions::Choices(c) = g.transitions(s) {
            let choice = c
                .iter()
                .filter(|&&t| winning[t] && dist[t] < dist[s])
                .min_by_key(|&&t| (dist[t], t))
                .copied();
            if let Some(t) = choice {
                pi.set(s, t);
            }
        }
    }
    pi
}

/// The largest set from which player 1 surely (on every path) avoids
/// `bad`, with a strategy staying inside. Computed as the complement of the
/// adversary attractor of `bad`.
pub fn sure_avoid(g: &Mdp, bad: &[bool]) -> (Vec<bool>, PureMemorylessStrategy) {
    let n = g.num_states();
    let mut attractor: Vec<bool> = bad.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if attractor[s] {
                continue;
            }
            let pulled = match g.transitions(s) {
                // Player 1 is pulled in only if every edge leads in.
                Transitions::Choices(c) => c.iter().all(|&t| attractor[t]),
                // The random player is pulled in if any edge leads in.
                Transitions::Distribution(d) => d.iter().any(|&(t, _)| attractor[t]),
            };
            if pulled {
                attractor[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let safe: Vec<bool> = attractor.iter().map(|&a| !a).collect();
    let mut pi = PureMemorylessStrategy::new();
    for s in 0..n {
        if safe[s] {
            if let Transitions::Choices(c) = g.transitions(s) {
                if let Some(&t) = c.iter().find(|&&t| safe[t]) {
                    pi.set(s, t);
                }
            }
        }
    }
    (safe, pi)
}

/// Stochastic shortest path: the strategy minimizing the expected number of
/// steps to `target` plus the optimal expected hitting times, via the
/// Bellman-inequality LP (maximize the sum of hitting times subject to
/// `h_s <= 1 + ...`).
pub fn shortest_path(g: &Mdp, target: &[bool]) -> Result<(PureMemorylessStrategy, Vec<f64>)> {
    let n = g.num_states();
    let all = vec![true; n];
    let (can, _) = prob1e_reach(g, target, &all);
    if can.iter().any(|&c| !c) {
        return Err(Error::Precondition(
            "target is not almost-surely reachable from every state".into(),
        ));
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    let vars: Vec<usize> =
        (0..n).map(|s| lp.add_default_var(format!("h{s}"), 1.0)).collect();
    for s in 0..n {
        if target[s] {
            lp.add_constraint(vec![(vars[s], 1.0)], RelOp::Le, 0.0);
            continue;
        }
        match g.transitions(s) {
            Transitions::Choices(c) => {
                for &t in c {
                    lp.add_constraint(vec![(vars[s], 1.0), (vars[t], -1.0)], RelOp::Le, 1.0);
                }
            }
            Transitions::Distribution(d) => {
                let mut coeffs = vec![(vars[s], 1.0)];
                for &(t, p) in d {
                    coeffs.push((vars[t], -p));
                }
                lp.add_constraint(coeffs, RelOp::Le, 1.0);
            }
        }
    }
    let solution = lp.solve()?.optimal()?;
    let h: Vec<f64> = (0..n).map(|s| solution.values[vars[s]]).collect();

    // Choosing the successor with the smallest hitting time strictly
    // decreases the potential, so the fixed chain reaches the target a.s.
    let mut pi = PureMemorylessStrategy::new();
    for s in 0..n {
        if target[s] {
            if let Transitions::Choices(c) = g.transitions(s) {
                // Any valid choice; keep determinism.
                pi.set(s, *c.iter().min().unwrap());
            }
            continue;
        }
        if let Transitions::Choices(c) = g.transitions(s) {
            let t = *c
                .iter()
                .min_by(|&&a, &&b| {
                    h[a].partial_cmp(&h[b]).unwrap().then(a.cmp(&b))
                })
                .unwrap();
            pi.set(s, t);
        }
    }
    Ok((pi, h))
}
