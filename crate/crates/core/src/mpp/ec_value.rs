//! Mean-payoff value of an end component via the state-action frequency
//! linear program, with extraction of a pure memoryless strategy achieving
//! the value from every component state.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RelOp, Sense};
use crate::stochastic::{strongly_connected_components, Mdp, PureMemorylessStrategy, Transitions};

use super::reach::prob1e_reach;
use super::{finite_rewards, VALUE_TOL};

/// Frequency variables of the LP: one per player-1 edge and one per
/// probabilistic state.
pub(crate) struct FrequencyLp {
    pub lp: LinearProgram,
    /// (state, successor) per player-1 edge variable.
    pub edge_vars: Vec<(usize, usize, usize)>,
    /// (state, var) per probabilistic state.
    pub prob_vars: Vec<(usize, usize)>,
}

/// Builds the frequency LP for the sub-MDP induced by `inside`:
/// maximize the frequency-weighted reward subject to normalization and flow
/// conservation. `forbidden(s)` forces the out-mass of a state to zero.
pub(crate) fn build_frequency_lp(
    g: &Mdp,
    inside: &[bool],
    rewards: &[f64],
    forbidden: impl Fn(usize) -> bool,
) -> FrequencyLp {
    let n = g.num_states();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let mut edge_vars = Vec::new();
    let mut prob_vars = Vec::new();
    // out_terms[s]: LP variables contributing to the out-mass of s.
    let mut out_terms: Vec<Vec<usize>> = vec![Vec::new(); n];
    // in_terms[t]: (var, coefficient) contributing to the in-mass of t.
    let mut in_terms: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];

    for s in 0..n {
        if !inside[s] {
            continue;
        }
        match g.transitions(s) {
            Transitions::Choices(c) => {
                for &t in c {
                    if !inside[t] {
                        continue;
                    }
                    let v = lp.add_default_var(format!("x_{s}_{t}"), rewards[s]);
                    edge_vars.push((s, t, v));
                    out_terms[s].push(v);
                    in_terms[t].push((v, 1.0));
                }
            }
            Transitions::Distribution(d) => {
                let v = lp.add_default_var(format!("y_{s}"), rewards[s]);
                prob_vars.push((s, v));
                out_terms[s].push(v);
                for &(t, p) in d {
                    in_terms[t].push((v, p));
                }
            }
        }
    }

    // Normalization: total frequency mass 1.
    let all_vars: Vec<(usize, f64)> = (0..lp.num_vars()).map(|v| (v, 1.0)).collect();
    lp.add_constraint(all_vars, RelOp::Eq, 1.0);

    // Flow conservation per state: out-mass equals in-mass.
    for s in 0..n {
        if !inside[s] {
            continue;
        }
        let mut coeffs: Vec<(usize, f64)> = out_terms[s].iter().map(|&v| (v, 1.0)).collect();
        for &(v, p) in &in_terms[s] {
            coeffs.push((v, -p));
        }
        lp.add_constraint(coeffs, RelOp::Eq, 0.0);
    }

    // Forbidden states carry no out-mass (their in-mass is then forced to
    // zero by conservation).
    for s in 0..n {
        if inside[s] && forbidden(s) {
            for &v in &out_terms[s] {
                lp.add_constraint(vec![(v, 1.0)], RelOp::Eq, 0.0);
            }
        }
    }

    FrequencyLp { lp, edge_vars, prob_vars }
}

/// Support structure of a frequency solution: states with positive
/// out-mass and, per player-1 state, its positive edges.
pub(crate) struct FrequencySupport {
    pub supp: Vec<bool>,
    pub pos_edges: Vec<Vec<(usize, usize)>>,
}

pub(crate) fn frequency_support(
    n: usize,
    freq: &FrequencyLp,
    values: &[f64],
    tol: f64,
) -> FrequencySupport {
    let mut supp = vec![false; n];
    let mut pos_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(s, t, v) in &freq.edge_vars {
        if values[v] > tol {
            supp[s] = true;
            pos_edges[s].push((t, v));
        }
    }
    for &(s, v) in &freq.prob_vars {
        if values[v] > tol {
            supp[s] = true;
        }
    }
    FrequencySupport { supp, pos_edges }
}

/// The flow-closed strongly connected components of the support graph.
pub(crate) fn support_components(
    g: &Mdp,
    support: &FrequencySupport,
) -> Vec<Vec<usize>> {
    let n = g.num_states();
    strongly_connected_components(n, &support.supp, |s| match g.transitions(s) {
        Transitions::Choices(_) => support.pos_edges[s].iter().map(|&(t, _)| t).collect(),
        Transitions::Distribution(d) => d.iter().map(|&(t, _)| t).collect(),
    })
}

/// The optimal mean-payoff value of the sub-MDP restricted to the end
/// component `u` (uniform over the component), together with a pure
/// memoryless strategy achieving it from every state of `u` while staying
/// inside.
pub fn ec_mean_payoff(g: &Mdp, u: &[usize]) -> Result<(f64, PureMemorylessStrategy)> {
    let rewards = finite_rewards(g);
    let n = g.num_states();
    let mut inside = vec![false; n];
    for &s in u {
        inside[s] = true;
    }
    let freq = build_frequency_lp(g, &inside, &rewards, |_| false);
    let solution = freq.lp.solve()?.optimal().map_err(|e| {
        Error::Internal(format!("frequency LP on an end component failed: {e}"))
    })?;
    let value = solution.objective;

    let support = frequency_support(n, &freq, &solution.values, 1e-9);
    let comps = support_components(g, &support);
    if comps.is_empty() {
        return Err(Error::Internal("frequency solution has empty support".into()));
    }
    // Any positive-mass component attains the optimum; pick the first
    // deterministically.
    let component = comps.into_iter().min().unwrap();
    let pi = extract_pure_in_component(g, &inside, &support, &component, value, &rewards)?;
    Ok((value, pi))
}

/// Builds a pure strategy: inside the chosen support component, follow
/// positive-frequency edges (resolving rare ambiguities by chain
/// evaluation); outside, reach the component almost surely. Verifies that
/// the fixed chain achieves `value` from every state of the sub-MDP.
pub(crate) fn extract_pure_in_component(
    g: &Mdp,
    inside: &[bool],
    support: &FrequencySupport,
    component: &[usize],
    value: f64,
    rewards: &[f64],
) -> Result<PureMemorylessStrategy> {
    let n = g.num_states();
    let mut in_component = vec![false; n];
    for &s in component {
        in_component[s] = true;
    }

    // Ambiguous player-1 states have several positive edges; basic LP
    // solutions make this rare. Try combinations, cheapest first.
    let mut fixed_choice: Vec<Option<usize>> = vec![None; n];
    let mut ambiguous: Vec<(usize, Vec<usize>)> = Vec::new();
    for &s in component {
        if !g.is_player1(s) {
            continue;
        }
        let mut targets: Vec<usize> = support.pos_edges[s]
            .iter()
            .map(|&(t, _)| t)
            .filter(|&t| in_component[t])
            .collect();
        targets.sort_unstable();
        targets.dedup();
        match targets.len() {
            0 => {
                return Err(Error::Internal(
                    "support component player-1 state without positive edge".into(),
                ))
            }
            1 => fixed_choice[s] = Some(targets[0]),
            _ => ambiguous.push((s, targets)),
        }
    }

    // Complete outside the component: almost-sure reach of the component
    // within the end component.
    let (can, reach) = prob1e_reach(g, &in_component, inside);
    if (0..n).any(|s| inside[s] && !can[s]) {
        return Err(Error::Internal(
            "support component not almost-surely reachable inside the end component".into(),
        ));
    }

    let combos = combo_iterator(&ambiguous, 64);
    for combo in combos {
        let mut pi = PureMemorylessStrategy::new();
        for &s in component {
            if let Some(t) = fixed_choice[s] {
                pi.set(s, t);
            }
        }
        for (i, &(s, _)) in ambiguous.iter().enumerate() {
            pi.set(s, combo[i]);
        }
        for (s, t) in reach.states() {
            if inside[s] && !in_component[s] {
                pi.set(s, t);
            }
        }
        if verify_uniform_value(g, inside, &pi, value, rewards)? {
            return Ok(pi);
        }
    }
    Err(Error::Internal(
        "no pure selection of the frequency support achieves the component value".into(),
    ))
}

/// All combinations of ambiguous choices, capped; past the cap only the
/// lexicographically first combination is yielded.
fn combo_iterator(ambiguous: &[(usize, Vec<usize>)], cap: usize) -> Vec<Vec<usize>> {
    let total: usize = ambiguous.iter().map(|(_, t)| t.len()).product::<usize>().max(1);
    if total > cap {
        return vec![ambiguous.iter().map(|(_, t)| t[0]).collect()];
    }
    let mut combos = vec![Vec::new()];
    for (_, targets) in ambiguous {
        let mut next = Vec::with_capacity(combos.len() * targets.len());
        for combo in &combos {
            for &t in targets {
                let mut c = combo.clone();
                c.push(t);
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// Fixes `pi` on the sub-MDP induced by `inside` and checks the resulting
/// chain attains `value` from every inside state.
fn verify_uniform_value(
    g: &Mdp,
    inside: &[bool],
    pi: &PureMemorylessStrategy,
    value: f64,
    rewards: &[f64],
) -> Result<bool> {
    let (sub, map) = g.restrict(inside)?;
    let mut pi_sub = PureMemorylessStrategy::new();
    for (s, t) in pi.states() {
        if let (Some(si), Some(ti)) = (map[s], map[t]) {
            pi_sub.set(si, ti);
        }
    }
    // Rewards of the restricted MDP follow g's; rebuild with the supplied
    // reward vector to stay independent of g's reward table.
    let rewards_sub: Vec<Option<f64>> = (0..g.num_states())
        .filter(|&s| inside[s])
        .map(|s| Some(rewards[s]))
        .collect();
    let chain = {
        let sub = sub.with_rewards(rewards_sub);
        sub.fix_strategy(&pi_sub)?
    };
    let (_, classes) = chain.recurrence_classes();
    for class in &classes {
        let v = chain.mean_payoff(class[0])?.expect("finite rewards");
        if (v - value).abs() > VALUE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
