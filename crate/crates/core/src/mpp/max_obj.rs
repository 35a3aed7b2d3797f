//! The max conversion: absorbing cash-out copies valued by the best
//! end-component values, turning the mean-payoff-parity objective into a
//! max objective solvable by a linear program.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RelOp, Sense};
use crate::stochastic::{Mdp, PureMemorylessStrategy, Transitions};

use super::{BestEcResult, VALUE_TOL};

/// The converted MDP: the original states, an absorbing copy per `S*`
/// state valued `f*`, and for probabilistic `S*` states an interposing
/// player-1 state that decides between cashing out and continuing (the
/// plain construction attaches cash-out edges to player-1 states only,
/// which misses end components without player-1 states, e.g. chains).
#[derive(Debug, Clone)]
pub struct MaxConversion {
    pub mdp: Mdp,
    /// Per converted state: the original state it is the cash-out copy of.
    pub copy_of: Vec<Option<usize>>,
    /// Per converted state: the original state it is the interposer of.
    pub interposer_of: Vec<Option<usize>>,
    /// Per original state: its decision state in the conversion (the
    /// interposer for interposed probabilistic states, itself otherwise).
    pub entry_of: Vec<usize>,
    /// The value shift applied to make all cash rewards strictly positive;
    /// subtract it from LP values to recover true values.
    pub shift: f64,
}

/// Builds the max conversion of `g` with the cash-out values `best.f_star`.
/// Cash rewards are shifted to be strictly positive (the LP correctness
/// argument needs positive rewards); the shift is recorded and undone by
/// [`solve_max`].
pub fn max_conversion(g: &Mdp, best: &BestEcResult) -> Result<MaxConversion> {
    let n = g.num_states();
    if best.f_star.len() != n {
        return Err(Error::Precondition("f* length mismatch".into()));
    }
    let min_f = best
        .f_star
        .iter()
        .filter_map(|v| *v)
        .fold(f64::INFINITY, f64::min);
    let shift = if min_f.is_finite() && min_f <= 0.0 { 1.0 - min_f } else { 0.0 };

    let mut names: Vec<String> = g.state_names().to_vec();
    let mut copy_of: Vec<Option<usize>> = vec![None; n];
    let mut interposer_of: Vec<Option<usize>> = vec![None; n];
    let mut entry_of: Vec<usize> = (0..n).collect();
    let mut rewards: Vec<Option<f64>> = vec![Some(0.0); n];

    // Allocate copies and interposers.
    let mut copy_id = vec![usize::MAX; n];
    let mut interposer_id = vec![usize::MAX; n];
    for s in 0..n {
        if let Some(f) = best.f_star[s] {
            copy_id[s] = names.len();
            names.push(format!("{}^", g.state_name(s)));
            copy_of.push(Some(s));
            interposer_of.push(None);
            rewards.push(Some(f + shift));
            if !g.is_player1(s) {
                interposer_id[s] = names.len();
                names.push(format!("{}°", g.state_name(s)));
                copy_of.push(None);
                interposer_of.push(Some(s));
                rewards.push(Some(0.0));
                entry_of[s] = interposer_id[s];
            }
        }
    }
    let total = names.len();

    let mut transitions: Vec<Transitions> = Vec::with_capacity(total);
    for s in 0..n {
        let t = match g.transitions(s) {
            Transitions::Choices(c) => {
                // Redirect into interposers; append the cash-out edge.
                let mut choices: Vec<usize> = c.iter().map(|&t| entry_of[t]).collect();
                if copy_id[s] != usize::MAX {
                    choices.push(copy_id[s]);
                }
                Transitions::Choices(choices)
            }
            Transitions::Distribution(d) => {
                Transitions::Distribution(d.iter().map(|&(t, p)| (entry_of[t], p)).collect())
            }
        };
        transitions.push(t);
    }
    for extra in n..total {
        if let Some(s) = copy_of[extra] {
            let _ = s;
            transitions.push(Transitions::Choices(vec![extra]));
        } else if let Some(s) = interposer_of[extra] {
            transitions.push(Transitions::Choices(vec![copy_id[s], s]));
        }
    }

    let initial = entry_of[g.initial()];
    let mdp = Mdp::new(names, initial, transitions).with_rewards(rewards);
    Ok(MaxConversion { mdp, copy_of, interposer_of, entry_of, shift })
}

/// The max-objective value of every original state of the conversion: the
/// least solution of the LP with `x_s >= 0`, `x_copy = reward`,
/// `x_s >= x_t` on player-1 edges, and `x_s = sum delta(s)(t) x_t` on
/// probabilistic states. The recorded shift is subtracted, so values are on
/// the caller's scale.
pub fn solve_max(conv: &MaxConversion) -> Result<Vec<f64>> {
    let (values, _, _) = solve_max_with_strategy(conv)?;
    Ok(values)
}

/// As [`solve_max`], also extracting the optimal decisions: travel choices
/// per original player-1 state (over original state ids) and the cash-out
/// mask (original states where the optimal play takes the copy edge).
pub(crate) fn solve_max_with_strategy(
    conv: &MaxConversion,
) -> Result<(Vec<f64>, PureMemorylessStrategy, Vec<bool>)> {
    let g = &conv.mdp;
    let total = g.num_states();
    let rewards: Vec<f64> =
        g.rewards().unwrap().iter().map(|r| r.expect("finite")).collect();

    let mut lp = LinearProgram::new(Sense::Minimize);
    let vars: Vec<usize> = (0..total).map(|s| lp.add_default_var(format!("x{s}"), 1.0)).collect();
    for s in 0..total {
        if conv.copy_of[s].is_some() {
            lp.add_constraint(vec![(vars[s], 1.0)], RelOp::Eq, rewards[s]);
            continue;
        }
        match g.transitions(s) {
            Transitions::Choices(c) => {
                for &t in c {
                    lp.add_constraint(vec![(vars[s], 1.0), (vars[t], -1.0)], RelOp::Ge, 0.0);
                }
            }
            Transitions::Distribution(d) => {
                let mut coeffs = vec![(vars[s], 1.0)];
                for &(t, p) in d {
                    coeffs.push((vars[t], -p));
                }
                lp.add_constraint(coeffs, RelOp::Eq, 0.0);
            }
        }
    }
    // The program has a row per player-1 edge but only a variable per
    // state; solving through the dual keeps the simplex basis small.
    let solution = lp
        .solve_preferring_dual()?
        .optimal()
        .map_err(|e| Error::Internal(format!("max-objective LP failed: {e}")))?;
    let x: Vec<f64> = (0..total).map(|s| solution.values[vars[s]]).collect();

    // A value-preserving edge of a player-1 state leads to a successor
    // within tolerance of the best successor value. Comparing against the
    // successor maximum (rather than x_s itself) keeps the extraction
    // robust to the LP's numerical drift on larger programs.
    let max_succ: Vec<f64> = (0..total)
        .map(|s| match g.transitions(s) {
            Transitions::Choices(c) => {
                c.iter().map(|&t| x[t]).fold(f64::NEG_INFINITY, f64::max)
            }
            Transitions::Distribution(_) => f64::NAN,
        })
        .collect();
    let preserving = |s: usize, t: usize| x[t] >= max_succ[s] - VALUE_TOL;

    // Layered extraction: distance to a cash-out through value-preserving
    // edges; player-1 states move strictly closer, probabilistic states may
    // detour but progress remains available everywhere.
    let mut dist = vec![usize::MAX; total];
    for s in 0..total {
        if conv.copy_of[s].is_some() {
            dist[s] = 0;
        }
    }
    loop {
        let mut changed = false;
        for s in 0..total {
            if dist[s] == 0 {
                continue;
            }
            let best = match g.transitions(s) {
                Transitions::Choices(c) => c
                    .iter()
                    .filter(|&&t| preserving(s, t))
                    .map(|&t| dist[t])
                    .min()
                    .unwrap_or(usize::MAX),
                Transitions::Distribution(d) => {
                    d.iter().map(|&(t, _)| dist[t]).min().unwrap_or(usize::MAX)
                }
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

    let mut travel = PureMemorylessStrategy::new();
    let mut cash = vec![false; conv.entry_of.len()];
    for s in 0..total {
        if conv.copy_of[s].is_some() {
            continue;
        }
        let Transitions::Choices(c) = g.transitions(s) else { continue };
        // Among value-preserving successors of minimal distance, prefer a
        // cash-out copy, then the lowest index.
        let mut best: Option<usize> = None;
        for &t in c {
            if !preserving(s, t) {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    let (db, cb) = (dist[b], conv.copy_of[b].is_some());
                    let (dt, ct) = (dist[t], conv.copy_of[t].is_some());
                    dt < db || (dt == db && ct && !cb) || (dt == db && ct == cb && t < b)
                }
            };
            if better {
                best = Some(t);
            }
        }
        let Some(t) = best else {
            return Err(Error::Internal(format!(
                "no value-preserving successor at '{}'",
                g.state_name(s)
            )));
        };
        if let Some(orig) = conv.copy_of[t] {
            cash[orig] = true;
            continue;
        }
        // Map interposer targets and sources back to original states.
        let source = conv.interposer_of[s].unwrap_or(s);
        let target = conv.interposer_of[t].unwrap_or(t);
        if conv.interposer_of[s].is_some() {
            // Interposer deciding to continue: no travel choice to record
            // (its original state is probabilistic).
            let _ = (source, target);
        } else {
            travel.set(source, target);
        }
    }

    let values: Vec<f64> =
        conv.entry_of.iter().map(|&e| x[e] - conv.shift).collect();
    Ok((values, travel, cash))
}
