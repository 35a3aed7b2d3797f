//! Command-line front-end: measuring machines, synthesizing controllers,
//! deciding memoryless optimality, generating benchmark instances, and
//! reproducing the benchmark tables.
//!
//! Exit codes: 0 success, 2 unrealizable, 3 validation/input error,
//! 4 internal or numeric error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mpsynth::clients::{self, BenchmarkSpec};
use mpsynth::error::Error;
use mpsynth::measure::system_value;
use mpsynth::synthesis::{synthesize, SynthesisMode, SynthesisResult};
use mpsynth::{dot, json};

#[derive(Parser)]
#[command(name = "mpsynth", version, about = "Measure and synthesize reactive systems against \
qualitative (safety/parity) and quantitative (mean-payoff) specifications under probabilistic \
input assumptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecInputs {
    /// Qualitative specification (safety or parity automaton, JSON).
    #[arg(short = 'a', long = "qualitative")]
    qualitative: PathBuf,
    /// Quantitative specification (mean-payoff automaton, JSON).
    #[arg(short = 'b', long = "quantitative")]
    quantitative: PathBuf,
    /// Input assumption (labeled Markov chain, JSON).
    #[arg(short = 'e', long = "environment")]
    environment: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Measure a Mealy machine against the specifications.
    Measure {
        /// The machine to measure (JSON).
        #[arg(short = 'm', long = "machine")]
        machine: PathBuf,
        #[command(flatten)]
        inputs: SpecInputs,
        /// Write the combined value chain in DOT format.
        #[arg(long = "dot")]
        dot: Option<PathBuf>,
    },
    /// Synthesize an optimal (or ε-optimal) machine.
    Synthesize {
        #[command(flatten)]
        inputs: SpecInputs,
        /// Build an ε-optimal finite machine when no exact finite-state
        /// optimum exists.
        #[arg(long = "epsilon", conflicts_with = "exact")]
        epsilon: Option<f64>,
        /// Report the counter strategy instead of approximating when the
        /// optimum needs infinite memory.
        #[arg(long = "exact")]
        exact: bool,
        /// Write the synthesized machine (JSON).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Write the synthesized machine in DOT format.
        #[arg(long = "dot")]
        dot: Option<PathBuf>,
    },
    /// Decide whether a pure memoryless (finite-state) optimum exists.
    /// Exit code 0 = yes, 1 = no.
    CheckMemoryless {
        #[command(flatten)]
        inputs: SpecInputs,
    },
    /// Generate an n-client request/grant benchmark instance.
    GenClients {
        /// Number of clients.
        #[arg(short = 'n', long = "clients")]
        clients: usize,
        /// Response bound: every request must be granted within K steps.
        #[arg(short = 'k', long = "response-bound")]
        response_bound: Option<usize>,
        /// Request probabilities, comma separated (e.g. 0.4,0.3); defaults
        /// to the skewed distribution.
        #[arg(short = 'p', long = "probabilities")]
        probabilities: Option<String>,
        /// Output directory for qual.json, quant.json and env.json.
        #[arg(short = 'o', long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Run the benchmark table over a range of client counts.
    Bench {
        #[arg(long = "from", default_value_t = 2)]
        from: usize,
        #[arg(long = "to", default_value_t = 7)]
        to: usize,
        /// Add response-bound constraints (bound = client count).
        #[arg(long = "response")]
        response: bool,
        /// Also write the rows as CSV.
        #[arg(long = "csv")]
        csv: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InputDomain(format!("cannot read {}: {e}", path.display())))
}

fn run() -> Result<u8, Error> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit codes collide with ours; usage errors are
            // validation errors (3), help/version requests are success.
            use clap::error::ErrorKind;
            let _ = e.print();
            return Ok(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            });
        }
    };
    match cli.command {
        Command::Measure { machine, inputs, dot: dot_out } => {
            let m = json::machine_from_json(&read(&machine)?)?;
            let a = json::automaton_from_json(&read(&inputs.qualitative)?)?;
            let b = json::automaton_from_json(&read(&inputs.quantitative)?)?;
            let env = json::chain_from_json(&read(&inputs.environment)?)?;
            if let Some(path) = dot_out {
                let chain = mpsynth::measure::build_value_chain(&m, &a, &b, &env)?;
                std::fs::write(path, dot::chain_to_dot(&chain))?;
            }
            let value = system_value(&m, &a, &b, &env)?;
            println!("{value}");
            Ok(0)
        }
        Command::Synthesize { inputs, epsilon, exact, output, dot: dot_out } => {
            let a = json::automaton_from_json(&read(&inputs.qualitative)?)?;
            let b = json::automaton_from_json(&read(&inputs.quantitative)?)?;
            let env = json::chain_from_json(&read(&inputs.environment)?)?;
            let mode = if exact {
                SynthesisMode::Exact
            } else {
                SynthesisMode::Epsilon(epsilon.unwrap_or(0.05))
            };
            let mut result = synthesize(&a, &b, &env, mode)?;
            mpsynth::synthesis::measure_result(&mut result, &a, &b, &env)?;
            match &result {
                SynthesisResult::Unrealizable { reason } => {
                    println!("unrealizable: {reason}");
                    return Ok(2);
                }
                SynthesisResult::OptimalMemoryless { machine, value } => {
                    println!("optimal value {value:.6} with {} states", machine.num_states());
                }
                SynthesisResult::EpsilonOptimal { machine, value, epsilon, declared_optimum } => {
                    println!(
                        "ε-optimal value {value:.6} (optimum {declared_optimum:.6}, ε={epsilon}) \
                         with {} states",
                        machine.num_states()
                    );
                }
                SynthesisResult::InfiniteMemoryRequired { optimum, .. } => {
                    println!(
                        "optimum {optimum:.6} requires infinite memory (counter strategy); \
                         re-run with --epsilon to approximate"
                    );
                }
            }
            if let Some(machine) = result.machine() {
                if let Some(path) = output {
                    std::fs::write(path, json::machine_to_json(machine))?;
                }
                if let Some(path) = dot_out {
                    std::fs::write(path, dot::machine_to_dot(machine))?;
                }
            }
            Ok(0)
        }
        Command::CheckMemoryless { inputs } => {
            let a = json::automaton_from_json(&read(&inputs.qualitative)?)?;
            let b = json::automaton_from_json(&read(&inputs.quantitative)?)?;
            let env = json::chain_from_json(&read(&inputs.environment)?)?;
            let result = synthesize(&a, &b, &env, SynthesisMode::Exact)?;
            match result {
                SynthesisResult::Unrealizable { reason } => {
                    println!("unrealizable: {reason}");
                    Ok(2)
                }
                SynthesisResult::OptimalMemoryless { value, .. } => {
                    println!("yes: memoryless optimum with value {value:.6}");
                    Ok(0)
                }
                SynthesisResult::InfiniteMemoryRequired { optimum, .. } => {
                    println!("no: optimum {optimum:.6} requires infinite memory");
                    Ok(1)
                }
                SynthesisResult::EpsilonOptimal { .. } => {
                    Err(Error::Internal("unexpected ε result in exact mode".into()))
                }
            }
        }
        Command::GenClients { clients, response_bound, probabilities, out_dir } => {
            let spec = match probabilities {
                None => BenchmarkSpec::skewed(clients, response_bound),
                Some(text) => {
                    let probabilities = text
                        .split(',')
                        .map(json::parse_rational)
                        .collect::<Result<Vec<_>, _>>()?;
                    BenchmarkSpec { clients, probabilities, response_bound }
                }
            };
            let (a, b, env) = clients::gen_clients(&spec)?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(out_dir.join("qual.json"), json::automaton_to_json(&a))?;
            std::fs::write(out_dir.join("quant.json"), json::automaton_to_json(&b))?;
            std::fs::write(out_dir.join("env.json"), json::chain_to_json(&env)?)?;
            println!(
                "wrote qual.json ({} states), quant.json ({} states), env.json ({} states) to {}",
                a.num_states(),
                b.num_states(),
                env.num_states(),
                out_dir.display()
            );
            Ok(0)
        }
        Command::Bench { from, to, response, csv } => {
            if from > to || from == 0 {
                return Err(Error::InputDomain("bad client range".into()));
            }
            let rows = clients::bench(from, to, response);
            print!("{}", clients::render_table(&rows));
            if let Some(path) = csv {
                std::fs::write(path, clients::render_csv(&rows))?;
            }
            Ok(if rows.iter().any(|r| r.error.is_some()) { 4 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Validation(_)
                | Error::InputDomain(_)
                | Error::AlphabetMismatch(_)
                | Error::AlphabetTooLarge { .. }
                | Error::Json(_)
                | Error::Precondition(_)
                | Error::HorizonTooLarge(_)
                | Error::UndefinedAverage(_) => 3,
                _ => 4,
            };
            ExitCode::from(code)
        }
    }
}
