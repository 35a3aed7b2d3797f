//! Independent oracles: naive linear algebra, chain analysis by power
//! iteration, exhaustive end-component search, and brute-force MDP solving
//! by strategy enumeration.

use std::collections::HashSet;

use mpsynth::stochastic::{MarkovChain, Mdp, Transitions};

use super::enumerate_strategies;

/// Naive Gauss-Jordan solve, independent of the library's LU.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        b[col] /= p;
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    for k in 0..n {
                        a[row][k] -= f * a[col][k];
                    }
                    b[row] -= f * b[col];
                }
            }
        }
    }
    Some(b)
}

/// Reachability-closure SCCs (Floyd-Warshall style), independent of Tarjan.
pub fn closure_sccs(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut reach = vec![vec![false; n]; n];
    for (s, row) in edges.iter().enumerate() {
        for &t in row {
            reach[s][t] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut sccs = Vec::new();
    for s in 0..n {
        if assigned[s] {
            continue;
        }
        let mut component = vec![s];
        assigned[s] = true;
        for t in s + 1..n {
            if !assigned[t] && reach[s][t] && reach[t][s] {
                component.push(t);
                assigned[t] = true;
            }
        }
        sccs.push(component);
    }
    sccs
}

/// Bottom SCCs of a chain via the closure oracle.
pub fn bottom_sccs(chain: &MarkovChain) -> Vec<Vec<usize>> {
    let n = chain.num_states();
    let edges: Vec<Vec<usize>> = (0..n)
        .map(|s| chain.successors(s).iter().map(|&(t, _)| t).collect())
        .collect();
    let sccs = closure_sccs(n, &edges);
    sccs.into_iter()
        .filter(|c| {
            c.iter().all(|&s| {
                chain.successors(s).iter().all(|&(t, _)| c.contains(&t))
            })
        })
        .collect()
}

/// Cesàro frequencies by power iteration: a burn-in kills the transient,
/// then the distribution is averaged over a window whose length is a
/// multiple of every possible period (lcm(1..=8) = 840), so periodic
/// oscillation cancels exactly.
pub fn power_iteration_frequencies(chain: &MarkovChain, from: usize, burn_in: usize) -> Vec<f64> {
    let n = chain.num_states();
    let window = 840 * 4;
    let mut dist = vec![0.0; n];
    dist[from] = 1.0;
    let step = |dist: &Vec<f64>| -> Vec<f64> {
        let mut next = vec![0.0; n];
        for s in 0..n {
            if dist[s] != 0.0 {
                for &(t, p) in chain.successors(s) {
                    next[t] += dist[s] * p;
                }
            }
        }
        next
    };
    for _ in 0..burn_in {
        dist = step(&dist);
    }
    let mut sum = vec![0.0; n];
    for _ in 0..window {
        for s in 0..n {
            sum[s] += dist[s];
        }
        dist = step(&dist);
    }
    sum.iter().map(|x| x / window as f64).collect()
}

/// Expected mean payoff of a chain from `from`, via the oracle pieces:
/// absorption into bottom SCCs solved by Gauss elimination and stationary
/// distributions likewise. Returns `None` for bottom (a reachable
/// bottom-reward state).
pub fn chain_mean_payoff(chain: &MarkovChain, from: usize) -> Option<f64> {
    let rewards = chain.rewards().expect("rewards");
    let n = chain.num_states();
    // Reachability.
    let mut reach = vec![false; n];
    let mut stack = vec![from];
    reach[from] = true;
    while let Some(s) = stack.pop() {
        for &(t, _) in chain.successors(s) {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    if (0..n).any(|s| reach[s] && rewards[s].is_none()) {
        return None;
    }
    let classes: Vec<Vec<usize>> =
        bottom_sccs(chain).into_iter().filter(|c| reach[c[0]]).collect();
    let mut class_of = vec![usize::MAX; n];
    for (k, c) in classes.iter().enumerate() {
        for &s in c {
            class_of[s] = k;
        }
    }
    // Stationary value of each class.
    let mut class_value = Vec::new();
    for class in &classes {
        let m = class.len();
        let mut a = vec![vec![0.0; m]; m];
        for (j, &s) in class.iter().enumerate() {
            for &(t, p) in chain.successors(s) {
                let i = class.iter().position(|&x| x == t).unwrap();
                a[i][j] += p;
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= 1.0;
        }
        for x in a[m - 1].iter_mut() {
            *x = 1.0;
        }
        let mut b = vec![0.0; m];
        b[m - 1] = 1.0;
        let pi = gauss_solve(a, b).expect("irreducible class");
        let v: f64 = class
            .iter()
            .zip(&pi)
            .map(|(&s, &p)| p * rewards[s].unwrap())
            .sum();
        class_value.push(v);
    }
    // Absorption probabilities from `from`.
    if class_of[from] != usize::MAX {
        return Some(class_value[class_of[from]]);
    }
    let transient: Vec<usize> =
        (0..n).filter(|&s| reach[s] && class_of[s] == usize::MAX).collect();
    let t = transient.len();
    let tindex = |s: usize| transient.iter().position(|&x| x == s);
    let mut value = 0.0;
    for (k, _) in classes.iter().enumerate() {
        let mut a = vec![vec![0.0; t]; t];
        let mut b = vec![0.0; t];
        for (i, &s) in transient.iter().enumerate() {
            a[i][i] = 1.0;
            for &(succ, p) in chain.successors(s) {
                if let Some(j) = tindex(succ) {
                    a[i][j] -= p;
                } else if class_of[succ] == k {
                    b[i] += p;
                }
            }
        }
        let x = gauss_solve(a, b).expect("transient system");
        value += x[tindex(from).unwrap()] * class_value[k];
    }
    Some(value)
}

/// Almost-sure parity of a chain from `from`, by the class oracle.
pub fn chain_parity(chain: &MarkovChain, from: usize) -> bool {
    let priorities = chain.priorities().expect("priorities");
    let mut reach = vec![false; chain.num_states()];
    let mut stack = vec![from];
    reach[from] = true;
    while let Some(s) = stack.pop() {
        for &(t, _) in chain.successors(s) {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    bottom_sccs(chain).into_iter().filter(|c| reach[c[0]]).all(|c| {
        c.iter().map(|&s| priorities[s]).min().unwrap() % 2 == 0
    })
}

/// Exhaustive end-component collection for small MDPs: every subset is
/// tested for delta-closure and strong connectivity.
pub fn all_end_components(g: &Mdp) -> Vec<Vec<usize>> {
    let n = g.num_states();
    assert!(n <= 16, "exhaustive EC search needs a small MDP");
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&s| mask & (1 << s) != 0).collect();
        if is_end_component(g, &set) {
            out.push(set);
        }
    }
    out
}

fn is_end_component(g: &Mdp, set: &[usize]) -> bool {
    let inside = |s: usize| set.contains(&s);
    for &s in set {
        match g.transitions(s) {
            Transitions::Distribution(d) => {
                if !d.iter().all(|&(t, _)| inside(t)) {
                    return false;
                }
            }
            Transitions::Choices(c) => {
                if !c.iter().any(|&t| inside(t)) {
                    return false;
                }
            }
        }
    }
    if set.len() == 1 {
        return g.successors(set[0]).contains(&set[0]);
    }
    // Strong connectivity of the restricted graph.
    let edges: Vec<Vec<usize>> = (0..g.num_states())
        .map(|s| {
            if inside(s) {
                g.successors(s).into_iter().filter(|&t| inside(t)).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let sccs = closure_sccs(g.num_states(), &edges);
    sccs.iter().any(|c| c.len() == set.len() && set.iter().all(|s| c.contains(s)))
}

/// Brute-force optimal mean payoff per state: the best expected chain value
/// over all pure memoryless strategies.
pub fn mdp_mean_payoff_enumeration(g: &Mdp) -> Vec<f64> {
    let mut best = vec![f64::NEG_INFINITY; g.num_states()];
    for pi in enumerate_strategies(g) {
        let chain = g.fix_strategy(&pi).expect("valid strategy");
        for s in 0..g.num_states() {
            if let Some(v) = chain_mean_payoff(&chain, s) {
                if v > best[s] {
                    best[s] = v;
                }
            }
        }
    }
    best
}

/// Brute-force almost-sure parity winning set: a state wins iff some pure
/// memoryless strategy makes every reachable recurrence class even-minimum
/// (memoryless strategies suffice for almost-sure parity in MDPs).
pub fn as_parity_enumeration(g: &Mdp) -> Vec<bool> {
    let n = g.num_states();
    let mut winning = vec![false; n];
    for pi in enumerate_strategies(g) {
        let chain = g.fix_strategy(&pi).expect("valid strategy");
        for s in 0..n {
            if !winning[s] && chain_parity(&chain, s) {
                winning[s] = true;
            }
        }
    }
    winning
}

/// Brute-force mean-payoff-parity value at every state.
///
/// Justified by the theory: the value equals the optimal expected cash-out
/// over end components with even minimum priority, where the cash value of
/// a component is its optimal mean payoff. The oracle enumerates end
/// components by subsets, values them by strategy enumeration, builds the
/// cash-out MDP explicitly (decision states in front of every valued
/// state), and solves it by a second strategy enumeration.
pub fn mpp_value_enumeration(g: &Mdp) -> Vec<Option<f64>> {
    let n = g.num_states();
    let priorities = g.priorities().expect("priorities");
    let winning = as_parity_enumeration(g);

    // f*(s): best value of an even-minimum end component containing s,
    // over components fully inside the winning set.
    let mut f_star: Vec<Option<f64>> = vec![None; n];
    for ec in all_end_components(g) {
        if ec.iter().any(|&s| !winning[s]) {
            continue;
        }
        let min = ec.iter().map(|&s| priorities[s]).min().unwrap();
        if min % 2 == 1 {
            continue;
        }
        // Value of the EC: best mean payoff over strategies staying inside.
        let mut keep = vec![false; n];
        for &s in &ec {
            keep[s] = true;
        }
        let Ok((sub, map)) = g.restrict(&keep) else { continue };
        let sub_best = mdp_mean_payoff_enumeration(&sub);
        // The EC value is uniform; take the max over its states to dodge
        // numerical unreachability artifacts.
        let v = sub_best.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for &s in &ec {
            let _ = map;
            let cur = f_star[s].unwrap_or(f64::NEG_INFINITY);
            if v > cur {
                f_star[s] = Some(v);
            }
        }
    }

    // Cash-out game: a decision state in front of every f*-valued state.
    let mut names: Vec<String> = (0..n).map(|s| format!("o{s}")).collect();
    let mut transitions: Vec<Transitions> = Vec::with_capacity(n);
    let mut entry: Vec<usize> = (0..n).collect();
    let mut cash_value: Vec<Option<f64>> = vec![None; n];
    let mut extra: Vec<(usize, f64)> = Vec::new(); // (original, value)
    for s in 0..n {
        if let Some(v) = f_star[s] {
            let id = n + extra.len();
            entry[s] = id;
            extra.push((s, v));
            names.push(format!("d{s}"));
        }
        let _ = &mut cash_value[s];
    }
    for s in 0..n {
        let t = match g.transitions(s) {
            Transitions::Choices(c) => Transitions::Choices(c.iter().map(|&t| entry[t]).collect()),
            Transitions::Distribution(d) => {
                Transitions::Distribution(d.iter().map(|&(t, p)| (entry[t], p)).collect())
            }
        };
        transitions.push(t);
    }
    let total = n + extra.len();
    let mut absorb = vec![false; total];
    for (i, &(orig, _)) in extra.iter().enumerate() {
        let id = n + i;
        // Decision: cash (absorb at id) or continue to the original state.
        transitions.push(Transitions::Choices(vec![id, orig]));
        absorb[id] = true;
    }
    let cash_mdp = Mdp::new(names, 0, transitions);

    // Expected cash value per state over all pure memoryless strategies of
    // the cash-out game. Absorbing decisions mean the chain has absorbing
    // states at the decisions that choose themselves.
    let mut best: Vec<f64> = vec![f64::NEG_INFINITY; total];
    for pi in enumerate_strategies(&cash_mdp) {
        let chain = cash_mdp.fix_strategy(&pi).expect("valid strategy");
        // Absorption probability into each cashing decision state.
        for s in 0..total {
            let value = expected_cash(&chain, s, &absorb, &extra, n);
            if let Some(v) = value {
                if v > best[s] {
                    best[s] = v;
                }
            }
        }
    }
    (0..n)
        .map(|s| {
            if !winning[s] {
                None
            } else {
                let v = best[entry[s]];
                if v == f64::NEG_INFINITY {
                    None
                } else {
                    Some(v)
                }
            }
        })
        .collect()
}

/// Expected cashed value from `s`: sum over absorbing decision states of
/// (absorption probability × cash value); `None` if some play never cashes
/// (those strategies cannot witness the value).
fn expected_cash(
    chain: &MarkovChain,
    s: usize,
    absorb: &[bool],
    extra: &[(usize, f64)],
    n: usize,
) -> Option<f64> {
    let classes = bottom_sccs(chain);
    let mut reach = vec![false; chain.num_states()];
    let mut stack = vec![s];
    reach[s] = true;
    while let Some(x) = stack.pop() {
        for &(t, _) in chain.successors(x) {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    // Every reachable bottom class must be a cashing self-loop.
    for class in &classes {
        if reach[class[0]] && !(class.len() == 1 && absorb[class[0]]) {
            return None;
        }
    }
    // Absorption probabilities via the rewards trick: reward 1 on the
    // target class, 0 elsewhere, mean payoff = absorption probability.
    let mut total = 0.0;
    for class in &classes {
        if !reach[class[0]] || class.len() != 1 {
            continue;
        }
        let id = class[0];
        if !absorb[id] {
            continue;
        }
        let value = extra[id - n].1;
        let rewards: Vec<Option<f64>> = (0..chain.num_states())
            .map(|x| Some(if x == id { 1.0 } else { 0.0 }))
            .collect();
        let probe = clone_with_rewards(chain, rewards);
        let p = chain_mean_payoff(&probe, s).expect("finite");
        total += p * value;
    }
    Some(total)
}

fn clone_with_rewards(chain: &MarkovChain, rewards: Vec<Option<f64>>) -> MarkovChain {
    let delta: Vec<Vec<(usize, f64)>> =
        (0..chain.num_states()).map(|s| chain.successors(s).to_vec()).collect();
    MarkovChain::new(chain.state_names().to_vec(), chain.initial(), delta).with_rewards(rewards)
}

/// Monte-Carlo mean payoff of a chain using an external RNG stream.
pub fn monte_carlo_mean_payoff(
    chain: &MarkovChain,
    from: usize,
    steps: usize,
    mut rng: impl FnMut() -> f64,
) -> f64 {
    let rewards = chain.rewards().expect("rewards");
    let mut s = from;
    let mut total = 0.0;
    for _ in 0..steps {
        total += rewards[s].expect("finite rewards");
        let coin = rng();
        let mut acc = 0.0;
        let row = chain.successors(s);
        let mut next = row[row.len() - 1].0;
        for &(t, p) in row {
            acc += p;
            if coin < acc {
                next = t;
                break;
            }
        }
        s = next;
    }
    total / steps as f64
}

/// Deduplicates state sets.
pub fn normalize_sets(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for s in sets.iter_mut() {
        s.sort_unstable();
    }
    let unique: HashSet<Vec<usize>> = sets.into_iter().collect();
    let mut out: Vec<Vec<usize>> = unique.into_iter().collect();
    out.sort();
    out
}
