//! MDPs with mean-payoff and mean-payoff-parity objectives: almost-sure
//! parity, best end-component values, the max-objective conversion and its
//! LP, the memoryless-optimality decision, and counter strategies.

mod counter;
mod ec_value;
mod max_obj;
mod memoryless;
mod reach;

pub use counter::{
    epsilon_strategy, evaluate_counter_strategy, optimal_counter_strategy, CounterStrategy,
    Schedule,
};
pub use ec_value::ec_mean_payoff;
pub use max_obj::{max_conversion, solve_max, MaxConversion};
pub use memoryless::memoryless_check_ec;
pub use reach::{prob1e_reach, sure_avoid};

use crate::error::{Error, Result};
use crate::measure::ValueOrBottom;
use crate::stochastic::{Mdp, PureMemorylessStrategy};

/// Value-comparison tolerance for LP results.
pub const VALUE_TOL: f64 = 1e-7;

/// One end component of a best-value layer: its states (ids of the MDP the
/// decomposition ran on), the layer priority, the uniform mean-payoff value
/// inside the component, and a pure memoryless strategy realizing that
/// value from every component state while staying inside.
#[derive(Debug, Clone)]
pub struct EcComponent {
    pub states: Vec<usize>,
    pub priority: u32,
    pub value: f64,
    pub gain: PureMemorylessStrategy,
}

/// Best end-component values: for every even priority `2i`, the maximal end
/// components of the sub-MDP of priority `>= 2i` that contain a `2i` state,
/// with their mean-payoff values. `f_star[s]` is the best value over all
/// components containing `s`; the union of all components is `S*`.
#[derive(Debug, Clone)]
pub struct BestEcResult {
    pub components: Vec<EcComponent>,
    pub f_star: Vec<Option<f64>>,
}

impl BestEcResult {
    pub fn s_star(&self) -> Vec<usize> {
        self.f_star.iter().enumerate().filter_map(|(s, v)| v.map(|_| s)).collect()
    }

    /// The first component containing `s` whose value equals `f_star[s]`.
    pub fn best_component_at(&self, s: usize) -> Option<usize> {
        let target = self.f_star[s]?;
        self.components
            .iter()
            .position(|c| c.states.contains(&s) && (c.value - target).abs() <= VALUE_TOL)
    }
}

/// Result bundle of the mean-payoff-parity solve: per-state values (bottom
/// outside the almost-sure winning set), the winning mask, the layered end
/// components, and a strategy plan (travel choices plus committed
/// components).
#[derive(Debug, Clone)]
pub struct MppSolution {
    pub values: Vec<ValueOrBottom>,
    pub winning: Vec<bool>,
    pub best: BestEcResult,
    /// Travel choices for winning player-1 states outside committed
    /// components.
    pub travel: PureMemorylessStrategy,
    /// States where the optimal play commits to harvesting a component.
    pub cash_at: Vec<bool>,
    /// Committed component indices (into `best.components`), and for each
    /// state of a committed component the index it belongs to.
    pub committed: Vec<usize>,
    pub commit_component_of: std::collections::BTreeMap<usize, usize>,
}

impl MppSolution {
    /// A full pure memoryless strategy: committed components play their
    /// gain strategy, everything else travels. For objectives without
    /// priorities (all 0) this strategy is optimal.
    pub fn memoryless_assembly(&self) -> PureMemorylessStrategy {
        let mut pi = PureMemorylessStrategy::new();
        for (s, t) in self.travel.states() {
            pi.set(s, t);
        }
        for (&s, &c) in &self.commit_component_of {
            if let Some(t) = self.best.components[c].gain.get(s) {
                pi.set(s, t);
            }
        }
        pi
    }
}

/// The almost-sure winning states for the parity objective: the states
/// from which player 1 can reach, with probability 1, the union of end
/// components whose minimum priority is even.
pub fn almost_sure_parity_states(g: &Mdp) -> Result<Vec<bool>> {
    let priorities =
        g.priorities().ok_or_else(|| Error::Precondition("MDP has no priorities".into()))?;
    let good = good_ec_union(g, priorities);
    let all = vec![true; g.num_states()];
    let (w, _) = prob1e_reach(g, &good, &all);
    Ok(w)
}

/// Union of all end components with even minimum priority, computed layer
/// by layer: for each even `d`, the MECs of the sub-MDP restricted to
/// priorities `>= d` that contain a `d` state.
fn good_ec_union(g: &Mdp, priorities: &[u32]) -> Vec<bool> {
    let n = g.num_states();
    let mut good = vec![false; n];
    let max_d = priorities.iter().copied().max().unwrap_or(0);
    let mut d = 0;
    while d <= max_d {
        let allowed: Vec<bool> = (0..n).map(|s| priorities[s] >= d).collect();
        for mec in g.mec_decomposition_on(&allowed) {
            let min = mec.iter().map(|&s| priorities[s]).min().unwrap();
            if min == d {
                for s in mec {
                    good[s] = true;
                }
            }
        }
        d += 2;
    }
    good
}

/// Best end-component values of `g` (priorities and finite rewards
/// required).
pub fn best_ec_values(g: &Mdp) -> Result<BestEcResult> {
    let priorities =
        g.priorities().ok_or_else(|| Error::Precondition("MDP has no priorities".into()))?;
    let n = g.num_states();
    let mut components = Vec::new();
    let mut f_star: Vec<Option<f64>> = vec![None; n];
    let max_d = priorities.iter().copied().max().unwrap_or(0);
    let mut d = 0;
    while d <= max_d {
        let allowed: Vec<bool> = (0..n).map(|s| priorities[s] >= d).collect();
        for mec in g.mec_decomposition_on(&allowed) {
            let min = mec.iter().map(|&s| priorities[s]).min().unwrap();
            if min != d {
                continue;
            }
            let (value, gain) = ec_mean_payoff(g, &mec)?;
            for &s in &mec {
                f_star[s] = Some(f_star[s].map_or(value, |v: f64| v.max(value)));
            }
            components.push(EcComponent { states: mec, priority: d, value, gain });
        }
        d += 2;
    }
    Ok(BestEcResult { components, f_star })
}

/// Optimal expected mean payoff per state together with a witnessing pure
/// memoryless strategy. Solved through the same pipeline as the
/// mean-payoff-parity objective with all priorities treated as 0: end
/// component values, max conversion, and the max-objective LP.
pub fn mdp_mean_payoff(g: &Mdp) -> Result<(Vec<f64>, PureMemorylessStrategy)> {
    check_finite_rewards(g)?;
    let flat = g.clone().with_priorities(vec![0; g.num_states()]);
    let solution = mpp_value(&flat)?;
    let values = solution
        .values
        .iter()
        .map(|v| v.value().expect("all states winning under trivial priorities"))
        .collect();
    Ok((values, solution.memoryless_assembly()))
}

/// The mean-payoff-parity value of every state: bottom outside the
/// almost-sure parity winning set; inside, the pipeline restricts to the
/// winning set, computes best end-component values, applies the max
/// conversion and solves the max-objective LP.
pub fn mpp_value(g: &Mdp) -> Result<MppSolution> {
    check_finite_rewards(g)?;
    let n = g.num_states();
    let w = almost_sure_parity_states(g)?;
    if w.iter().all(|&x| !x) {
        return Ok(MppSolution {
            values: vec![ValueOrBottom::Bottom; n],
            winning: w,
            best: BestEcResult { components: Vec::new(), f_star: vec![None; n] },
            travel: PureMemorylessStrategy::new(),
            cash_at: vec![false; n],
            committed: Vec::new(),
            commit_component_of: std::collections::BTreeMap::new(),
        });
    }
    let (sub, map) = g.restrict(&w)?;
    let mut back = vec![usize::MAX; sub.num_states()];
    for (orig, m) in map.iter().enumerate() {
        if let Some(i) = m {
            back[*i] = orig;
        }
    }

    let best_sub = best_ec_values(&sub)?;
    let conv = max_conversion(&sub, &best_sub)?;
    let (x_sub, travel_sub, cash_sub) = max_obj::solve_max_with_strategy(&conv)?;

    // Committed components: any component with a cash state.
    let mut committed = Vec::new();
    let mut commit_component_of = std::collections::BTreeMap::new();
    for (s, &cash) in cash_sub.iter().enumerate() {
        if cash {
            if let Some(c) = best_sub.best_component_at(s) {
                if !committed.contains(&c) {
                    committed.push(c);
                }
            }
        }
    }
    committed.sort_unstable();
    for &c in &committed {
        for &s in &best_sub.components[c].states {
            commit_component_of.entry(back[s]).or_insert(c);
        }
    }

    // Map the sub-MDP results back to the original state space.
    let mut values = vec![ValueOrBottom::Bottom; n];
    let mut cash_at = vec![false; n];
    for s_sub in 0..sub.num_states() {
        values[back[s_sub]] = ValueOrBottom::Value(x_sub[s_sub]);
        cash_at[back[s_sub]] = cash_sub[s_sub];
    }
    let mut travel = PureMemorylessStrategy::new();
    for (s_sub, t_sub) in travel_sub.states() {
        travel.set(back[s_sub], back[t_sub]);
    }
    let mut components = Vec::new();
    for c in &best_sub.components {
        let mut gain = PureMemorylessStrategy::new();
        for (s_sub, t_sub) in c.gain.states() {
            gain.set(back[s_sub], back[t_sub]);
        }
        components.push(EcComponent {
            states: c.states.iter().map(|&s| back[s]).collect(),
            priority: c.priority,
            value: c.value,
            gain,
        });
    }
    let mut f_star = vec![None; n];
    for (s_sub, v) in best_sub.f_star.iter().enumerate() {
        f_star[back[s_sub]] = *v;
    }

    Ok(MppSolution {
        values,
        winning: w,
        best: BestEcResult { components, f_star },
        travel,
        cash_at,
        committed,
        commit_component_of,
    })
}

/// Decides whether a pure memoryless strategy achieves the optimal
/// mean-payoff-parity value at the initial state, and assembles one when it
/// does: the solve is re-run with cash-outs only at components that pass
/// the memoryless check, and the two values must coincide.
pub fn has_optimal_memoryless(g: &Mdp) -> Result<(bool, Option<PureMemorylessStrategy>)> {
    let full = mpp_value(g)?;
    let initial = g.initial();
    if full.values[initial].is_bottom() {
        // No strategy achieves more than bottom; trivially memoryless.
        return Ok((true, None));
    }

    // Check each component for a memoryless witness (strategies over the
    // original state ids).
    let mut witnesses: Vec<Option<PureMemorylessStrategy>> = Vec::new();
    for c in &full.best.components {
        let mut keep = vec![false; g.num_states()];
        for &s in &c.states {
            keep[s] = true;
        }
        let (sub, map) = g.restrict(&keep)?;
        let witness = memoryless_check_ec(&sub, c.value)?;
        witnesses.push(witness.map(|pi| {
            let mut back = vec![usize::MAX; sub.num_states()];
            for (orig, m) in map.iter().enumerate() {
                if let Some(i) = m {
                    back[*i] = orig;
                }
            }
            let mut mapped = PureMemorylessStrategy::new();
            for (s, t) in pi.states() {
                mapped.set(back[s], back[t]);
            }
            mapped
        }));
    }

    let full_value = full.values[initial].value().unwrap();
    if witnesses.iter().all(|w| w.is_none()) {
        return Ok((false, None));
    }

    // Re-run the max pipeline with cash-outs only at witnessed components.
    let (sub, map) = g.restrict(&full.winning)?;
    let mut back = vec![usize::MAX; sub.num_states()];
    for (orig, m) in map.iter().enumerate() {
        if let Some(i) = m {
            back[*i] = orig;
        }
    }
    let mut filtered_components = Vec::new();
    let mut witness_of_filtered = Vec::new();
    let mut filtered_f: Vec<Option<f64>> = vec![None; sub.num_states()];
    for (ci, (c, witness)) in full.best.components.iter().zip(&witnesses).enumerate() {
        if witness.is_none() {
            continue;
        }
        let states_sub: Vec<usize> =
            c.states.iter().map(|&s| map[s].expect("component inside W")).collect();
        for &s in &states_sub {
            filtered_f[s] = Some(filtered_f[s].map_or(c.value, |v: f64| v.max(c.value)));
        }
        let mut gain_sub = PureMemorylessStrategy::new();
        for (s, t) in c.gain.states() {
            gain_sub.set(map[s].unwrap(), map[t].unwrap());
        }
        filtered_components.push(EcComponent {
            states: states_sub,
            priority: c.priority,
            value: c.value,
            gain: gain_sub,
        });
        witness_of_filtered.push(ci);
    }
    let filtered_best = BestEcResult { components: filtered_components, f_star: filtered_f };
    let conv = max_conversion(&sub, &filtered_best)?;
    let (x, travel_sub, cash_sub) = max_obj::solve_max_with_strategy(&conv)?;
    let initial_sub = map[initial].expect("initial state is winning");
    if (x[initial_sub] - full_value).abs() > VALUE_TOL {
        return Ok((false, None));
    }

    // Assemble: travel outside, witnesses inside committed components, any
    // valid choice on losing states (unreachable from winning ones under
    // this strategy, but totality keeps the strategy directly playable).
    let mut pi = PureMemorylessStrategy::new();
    for (s_sub, t_sub) in travel_sub.states() {
        pi.set(back[s_sub], back[t_sub]);
    }
    for (s_sub, &cash) in cash_sub.iter().enumerate() {
        if !cash {
            continue;
        }
        if let Some(ci) = filtered_best.best_component_at(s_sub) {
            if let Some(witness) = &witnesses[witness_of_filtered[ci]] {
                for (s, t) in witness.states() {
                    pi.set(s, t);
                }
            }
        }
    }
    for s in 0..g.num_states() {
        if g.is_player1(s) && pi.get(s).is_none() {
            pi.set(s, *g.successors(s).iter().min().unwrap());
        }
    }
    Ok((true, Some(pi)))
}

/// Pure memoryless strategy minimizing the expected number of steps to
/// reach `target`, which must be almost-surely reachable from every state.
/// Also returns the optimal expected hitting times.
pub fn shortest_path_strategy(
    g: &Mdp,
    target: &[bool],
) -> Result<(PureMemorylessStrategy, Vec<f64>)> {
    reach::shortest_path(g, target)
}

fn check_finite_rewards(g: &Mdp) -> Result<()> {
    let rewards = g.rewards().ok_or_else(|| Error::Precondition("MDP has no rewards".into()))?;
    if rewards.iter().any(|r| r.is_none()) {
        return Err(Error::Precondition("MDP has bottom rewards".into()));
    }
    Ok(())
}

pub(crate) fn finite_rewards(g: &Mdp) -> Vec<f64> {
    g.rewards()
        .expect("rewards present")
        .iter()
        .map(|r| r.expect("finite reward"))
        .collect()
}
