//! Trains the selected methods on a synthetic corpus and prints the
//! comparison table.
//!
//! cargo run --release --example compare_methods -- [n_sessions] [methods] [seed]

use chatsat::eval::{parse_methods, run_experiment, ExperimentConfig};
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().map_or(Ok(2000), |s| s.parse()).expect("n_sessions");
    let methods = parse_methods(args.get(1).map_or("valence,ngram,lstm_time", String::as_str))?;
    let seed = args.get(2).map_or(Ok(0), |s| s.parse()).expect("seed");
    let spec = GenSpec {
        n_sessions: n,
        labeled_fraction: 1.0,
        rng_seed: seed,
        ..GenSpec::default()
    };
    let (corpus, _) = generate(&spec)?;
    let cfg = ExperimentConfig {
        seed,
        methods,
        ..ExperimentConfig::default()
    };
    let (_, report) = run_experiment(&corpus, &cfg)?;
    print!("{}", report.to_table());
    Ok(())
}
