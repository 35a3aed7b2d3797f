//! The measurement worked examples: the alternator and priority controllers
//! against the summed two-client reward spec under uniform inputs, and the
//! generated benchmark instances.

mod common;

use common::{
    machine_m1, machine_m2, two_client_quantitative, two_client_trivial_qualitative, uniform_chain,
};
use mpsynth::clients::{gen_clients, BenchmarkSpec};
use mpsynth::measure::{
    build_value_chain, satisfies_under_mu, system_value, system_value_with_options,
    uniform_prefix_value, ValueOrBottom,
};
use mpsynth::synthesis::build_synthesis_mdp;

#[test]
fn alternator_value_is_three_halves() {
    let m1 = machine_m1();
    let a = two_client_trivial_qualitative();
    let b = two_client_quantitative();
    let env = uniform_chain(&["r1", "r2"]);
    let v = system_value(&m1, &a, &b, &env).unwrap();
    match v {
        ValueOrBottom::Value(x) => assert!((x - 1.5).abs() < 1e-9, "got {x}"),
        ValueOrBottom::Bottom => panic!("unexpected bottom"),
    }
}

#[test]
fn priority_controller_value_is_five_thirds() {
    let m2 = machine_m2();
    let a = two_client_trivial_qualitative();
    let b = two_client_quantitative();
    let env = uniform_chain(&["r1", "r2"]);
    let v = system_value(&m2, &a, &b, &env).unwrap().value().unwrap();
    assert!((v - 5.0 / 3.0).abs() < 1e-9, "got {v}");
}

#[test]
fn split_chain_option_agrees() {
    let m2 = machine_m2();
    let a = two_client_trivial_qualitative();
    let b = two_client_quantitative();
    let env = uniform_chain(&["r1", "r2"]);
    let joint = system_value(&m2, &a, &b, &env).unwrap().value().unwrap();
    let split = system_value_with_options(&m2, &a, &b, &env, true).unwrap().value().unwrap();
    assert!((joint - split).abs() < 1e-12);
}

/// The main-state frequencies of the priority controller's product chain:
/// 2/3, 2/9 and 1/9 after conditioning on the response phase.
#[test]
fn m2_product_chain_frequencies() {
    let m2 = machine_m2();
    let a = two_client_trivial_qualitative();
    let b = two_client_quantitative();
    let env = uniform_chain(&["r1", "r2"]);
    let chain = build_value_chain(&m2, &a, &b, &env).unwrap();
    let freq = chain.longrun_frequencies(chain.initial()).unwrap();

    // Phase-0 states carry names "(machineState,...|env|0)"; aggregate by
    // machine state and normalize by the phase-0 mass (one half).
    let mut by_machine = [0.0f64; 3];
    let mut phase0_mass = 0.0;
    for s in 0..chain.num_states() {
        let name = chain.state_name(s);
        if name.ends_with("|0)") {
            phase0_mass += freq[s];
            for (i, q) in ["(q0,", "(q1,", "(q2,"].iter().enumerate() {
                if name.starts_with(q) {
                    by_machine[i] += freq[s];
                }
            }
        }
    }
    assert!((phase0_mass - 0.5).abs() < 1e-9);
    let main: Vec<f64> = by_machine.iter().map(|x| x / phase0_mass).collect();
    assert!((main[0] - 2.0 / 3.0).abs() < 1e-9, "q0 frequency {}", main[0]);
    assert!((main[1] - 2.0 / 9.0).abs() < 1e-9, "q1 frequency {}", main[1]);
    assert!((main[2] - 1.0 / 9.0).abs() < 1e-9, "q2 frequency {}", main[2]);
}

#[test]
fn both_machines_satisfy_trivial_spec() {
    let a = two_client_trivial_qualitative();
    let env = uniform_chain(&["r1", "r2"]);
    assert!(satisfies_under_mu(&machine_m1(), &a, &env).unwrap());
    assert!(satisfies_under_mu(&machine_m2(), &a, &env).unwrap());
}

/// The finite-horizon uniform-prefix average converges to the chain value.
#[test]
fn uniform_prefix_converges() {
    let m1 = machine_m1();
    let b = two_client_quantitative();
    let v32 = uniform_prefix_value(&m1, &b, 32).unwrap();
    let approx = mpsynth::measure::big_rational_to_f64(&v32);
    assert!((approx - 1.5).abs() < 0.05, "horizon-32 average {approx}");
}

#[test]
fn generated_mdp_sizes_match_the_closed_form() {
    for (n, expected) in [(2usize, 13usize), (3, 35), (4, 97)] {
        let spec = BenchmarkSpec::skewed(n, None);
        let (a, b, env) = gen_clients(&spec).unwrap();
        let syn = build_synthesis_mdp(&a, &b, &env).unwrap();
        assert_eq!(
            syn.mdp.num_states(),
            expected,
            "clients={n}: expected {expected} states, got {}",
            syn.mdp.num_states()
        );
    }
}
