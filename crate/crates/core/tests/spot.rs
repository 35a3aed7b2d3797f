mod common;
use mpsynth::clients::{gen_clients, BenchmarkSpec};
use mpsynth::synthesis::{build_synthesis_mdp, synthesize, SynthesisMode};
use std::time::Instant;

#[test]
fn spot_values() {
    for (n, resp) in [(4usize, false), (5, false), (3, true), (4, true)] {
        let t = Instant::now();
        let spec = BenchmarkSpec::skewed(n, resp.then_some(n));
        let (a, b, env) = gen_clients(&spec).unwrap();
        let syn = build_synthesis_mdp(&a, &b, &env).unwrap();
        let result = synthesize(&a, &b, &env, SynthesisMode::Exact);
        match result {
            Ok(r) => println!(
                "n={n} resp={resp}: mdp={} value={:?} machine={:?} elapsed={:.2}s",
                syn.mdp.num_states(), r.value(), r.machine().map(|m| m.num_states()),
                t.elapsed().as_secs_f64()
            ),
            Err(e) => println!("n={n} resp={resp}: mdp={} ERROR {e} elapsed={:.2}s",
                syn.mdp.num_states(), t.elapsed().as_secs_f64()),
        }
    }
}
