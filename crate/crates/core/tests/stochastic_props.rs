//! Property and oracle tests for the stochastic layer: recurrence classes
//! against closure SCCs, frequencies against power iteration, mean payoff
//! against Monte Carlo, and end components against exhaustive search.

mod common;

use common::{oracles, randgen};
use mpsynth::stochastic::Mdp;
use rand::Rng;

#[test]
fn recurrence_classes_match_closure_oracle() {
    for seed in 0..120 {
        let chain = randgen::random_chain(seed, 7, false);
        let (_, classes) = chain.recurrence_classes();
        let expected = oracles::bottom_sccs(&chain);
        assert_eq!(
            oracles::normalize_sets(classes),
            oracles::normalize_sets(expected),
            "seed {seed}"
        );
    }
}

#[test]
fn frequencies_match_power_iteration() {
    for seed in 0..60 {
        let chain = randgen::random_chain(seed, 6, false);
        let freq = chain.longrun_frequencies(0).unwrap();
        let sum: f64 = freq.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "seed {seed}: frequencies sum {sum}");
        let approx = oracles::power_iteration_frequencies(&chain, 0, 200_000);
        for (s, (&a, &b)) in freq.iter().zip(&approx).enumerate() {
            assert!(
                (a - b).abs() < 1e-6,
                "seed {seed} state {s}: exact {a} vs power {b}"
            );
        }
    }
}

#[test]
fn mean_payoff_matches_gauss_oracle() {
    for seed in 0..120 {
        let chain = randgen::random_chain(seed, 7, false);
        let mine = chain.mean_payoff(0).unwrap();
        let oracle = oracles::chain_mean_payoff(&chain, 0);
        match (mine, oracle) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}"),
            (a, b) => panic!("seed {seed}: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn mean_payoff_matches_monte_carlo() {
    for seed in 0..10 {
        let chain = randgen::random_chain(seed, 5, false);
        let exact = chain.mean_payoff(0).unwrap().unwrap();
        let mut rng = randgen::rng(seed.wrapping_add(999));
        let sampled =
            oracles::monte_carlo_mean_payoff(&chain, 0, 1_000_000, move || rng.gen::<f64>());
        assert!(
            (exact - sampled).abs() < 1e-2,
            "seed {seed}: exact {exact} vs sampled {sampled}"
        );
    }
}

/// Mean payoff shifts by exactly c when all rewards shift by c.
#[test]
fn mean_payoff_shift_equivariance() {
    for seed in 0..60 {
        let chain = randgen::random_chain(seed, 6, false);
        let c = 2.5;
        let shifted_rewards: Vec<Option<f64>> =
            chain.rewards().unwrap().iter().map(|r| r.map(|v| v + c)).collect();
        let delta: Vec<Vec<(usize, f64)>> =
            (0..chain.num_states()).map(|s| chain.successors(s).to_vec()).collect();
        let shifted = mpsynth::stochastic::MarkovChain::new(
            chain.state_names().to_vec(),
            chain.initial(),
            delta,
        )
        .with_rewards(shifted_rewards);
        let a = chain.mean_payoff(0).unwrap().unwrap();
        let b = shifted.mean_payoff(0).unwrap().unwrap();
        assert!((b - (a + c)).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn parity_matches_class_oracle() {
    for seed in 0..120 {
        let chain = randgen::random_chain(seed, 7, true);
        for s in 0..chain.num_states() {
            assert_eq!(
                chain.parity_almost_sure(s).unwrap(),
                oracles::chain_parity(&chain, s),
                "seed {seed} state {s}"
            );
        }
    }
}

/// Every returned MEC is an end component, and every end component found by
/// exhaustive subset search is contained in some returned MEC.
#[test]
fn mec_decomposition_matches_subset_oracle() {
    for seed in 0..120 {
        let g = randgen::random_mdp(seed, 8, 3);
        let mecs = g.mec_decomposition();
        for mec in &mecs {
            assert!(g.is_end_component(mec), "seed {seed}: {mec:?} not an EC");
        }
        // Disjointness.
        let mut seen = vec![false; g.num_states()];
        for mec in &mecs {
            for &s in mec {
                assert!(!seen[s], "seed {seed}: MECs overlap");
                seen[s] = true;
            }
        }
        for ec in oracles::all_end_components(&g) {
            assert!(
                mecs.iter().any(|m| ec.iter().all(|s| m.contains(s))),
                "seed {seed}: EC {ec:?} not covered by {mecs:?}"
            );
        }
    }
}

/// Fixing the uniform strategy on a MEC makes the component one closed
/// recurrence class.
#[test]
fn uniform_ec_strategy_realizes_the_component() {
    for seed in 0..120 {
        let g = randgen::random_mdp(seed, 7, 3);
        for mec in g.mec_decomposition() {
            let sigma = g.uniform_ec_strategy(&mec).unwrap();
            // Complete the strategy arbitrarily outside the component.
            let mut full = sigma.clone();
            for s in 0..g.num_states() {
                if let mpsynth::stochastic::Transitions::Choices(c) = g.transitions(s) {
                    if full.get(s).is_none() {
                        full.set(s, vec![(c[0], 1.0)]);
                    }
                }
            }
            let chain = g.fix_randomized(&full).unwrap();
            let (_, classes) = chain.recurrence_classes();
            let mut sorted = mec.clone();
            sorted.sort_unstable();
            assert!(
                classes.iter().any(|c| *c == sorted),
                "seed {seed}: component {sorted:?} not a class of {classes:?}"
            );
        }
    }
}

/// Every bottom SCC of every fixed-strategy chain is inside some MEC.
#[test]
fn fixed_strategy_classes_are_covered_by_mecs() {
    for seed in 0..60 {
        let g = randgen::random_mdp(seed, 6, 3);
        let mecs = g.mec_decomposition();
        for pi in common::enumerate_strategies(&g) {
            let chain = g.fix_strategy(&pi).unwrap();
            let (_, classes) = chain.recurrence_classes();
            for class in classes {
                assert!(
                    mecs.iter().any(|m| class.iter().all(|s| m.contains(s))),
                    "seed {seed}: class {class:?} outside MECs {mecs:?}"
                );
            }
        }
    }
}

/// fix_strategy keeps exactly the chosen edges.
#[test]
fn fix_strategy_edge_sets() {
    for seed in 0..60 {
        let g = randgen::random_mdp(seed, 6, 3);
        let strategies = common::enumerate_strategies(&g);
        let pi = &strategies[seed as usize % strategies.len()];
        let chain = g.fix_strategy(pi).unwrap();
        for s in 0..g.num_states() {
            match g.transitions(s) {
                mpsynth::stochastic::Transitions::Choices(_) => {
                    assert_eq!(chain.successors(s), &[(pi.get(s).unwrap(), 1.0)]);
                }
                mpsynth::stochastic::Transitions::Distribution(d) => {
                    assert_eq!(chain.successors(s), d.as_slice());
                }
            }
        }
    }
}

/// A Markov chain viewed as an MDP decomposes into its recurrence classes.
#[test]
fn chain_mecs_are_recurrence_classes() {
    for seed in 0..60 {
        let chain = randgen::random_chain(seed, 7, false);
        let g = Mdp::from_chain(&chain);
        let (_, classes) = chain.recurrence_classes();
        assert_eq!(
            oracles::normalize_sets(g.mec_decomposition()),
            oracles::normalize_sets(classes),
            "seed {seed}"
        );
    }
}
