//! Deciding whether an end component admits a pure memoryless strategy
//! achieving its mean-payoff-parity value.
//!
//! For each even priority `d`, a frequency LP restricted to states of
//! priority at least `d` (stage A) must reach the component value; a second
//! LP maximizing the frequency of priority-`d` states subject to stage-A
//! optimality (stage B) must then be strictly positive. A positive stage B
//! witnesses a recurrence class of value `v` whose minimum priority is the
//! even `d`, from which the strategy is read off.

use crate::error::{Error, Result};
use crate::lp::{LpOutcome, RelOp};
use crate::stochastic::{Mdp, PureMemorylessStrategy};

use super::ec_value::{
    build_frequency_lp, extract_pure_in_component, frequency_support, support_components,
};
use super::{finite_rewards, VALUE_TOL};

/// Checks the end component `g` (the whole MDP must be one end component
/// with an even minimum priority) for a pure memoryless strategy achieving
/// the component value `v`. Returns the strategy over `g`'s states when one
/// exists: inside the witnessing recurrence class it follows the positive
/// frequencies, outside it plays an almost-sure reach strategy into the
/// class.
pub fn memoryless_check_ec(g: &Mdp, v: f64) -> Result<Option<PureMemorylessStrategy>> {
    let priorities =
        g.priorities().ok_or_else(|| Error::Precondition("MDP has no priorities".into()))?;
    let rewards = finite_rewards(g);
    let n = g.num_states();
    let inside = vec![true; n];

    let mut even_priorities: Vec<u32> =
        priorities.iter().copied().filter(|p| p % 2 == 0).collect();
    even_priorities.sort_unstable();
    even_priorities.dedup();

    for &d in &even_priorities {
        // Stage A: maximum mean payoff achievable while visiting only
        // states of priority >= d.
        let freq = build_frequency_lp(g, &inside, &rewards, |s| priorities[s] < d);
        let stage_a = match freq.lp.solve()? {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                return Err(Error::Internal("frequency LP unbounded".into()))
            }
        };
        if (stage_a.objective - v).abs() > VALUE_TOL {
            continue;
        }

        // Stage B: among stage-A-optimal solutions, maximize the frequency
        // mass on priority-d states.
        let mut stage_b_lp = freq.lp.clone();
        let mut objective_row = Vec::new();
        for var in 0..stage_b_lp.num_vars() {
            objective_row.push((var, stage_b_lp.objective_coeff(var)));
            stage_b_lp.set_objective(var, 0.0);
        }
        for &(s, t, var) in &freq.edge_vars {
            let _ = t;
            if priorities[s] == d {
                stage_b_lp.set_objective(var, 1.0);
            }
        }
        for &(s, var) in &freq.prob_vars {
            if priorities[s] == d {
                stage_b_lp.set_objective(var, 1.0);
            }
        }
        stage_b_lp.add_constraint(objective_row, RelOp::Ge, stage_a.objective - 1e-9);
        let stage_b = match stage_b_lp.solve()? {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                return Err(Error::Internal("stage-B LP unbounded".into()))
            }
        };
        if stage_b.objective <= 1e-9 {
            continue;
        }

        // Extract: a support component carrying priority-d mass has value v
        // and even minimum priority d.
        let support = frequency_support(n, &freq, &stage_b.values, 1e-9);
        let comps = support_components(g, &support);
        let chosen = comps.into_iter().find(|c| {
            c.iter().any(|&s| priorities[s] == d && state_has_mass(&support, s))
        });
        let Some(component) = chosen else { continue };
        match extract_pure_in_component(g, &inside, &support, &component, v, &rewards) {
            Ok(pi) => {
                // The extraction verified the value; re-check parity of the
                // fixed chain from every state.
                let chain = g.fix_strategy(&pi)?;
                if (0..n).all(|s| chain.parity_almost_sure(s).unwrap_or(false)) {
                    return Ok(Some(pi));
                }
            }
            Err(_) => continue,
        }
    }
    Ok(None)
}

fn state_has_mass(support: &super::ec_value::FrequencySupport, s: usize) -> bool {
    support.supp[s]
}
