//! Trains on the rated sessions, calls the unrated ones and compares the
//! two dissatisfaction rates.
//!
//! cargo run --release --example bias_report

use chatsat::eval::{bias_report, infer_unlabeled, run_experiment, ExperimentConfig, Method};
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    let (corpus, truth) = generate(&GenSpec {
        n_sessions: 3000,
        labeled_fraction: 0.5,
        dissatisfied_rate_labeled: 0.2,
        dissatisfied_rate_unlabeled: 0.5,
        ..GenSpec::default()
    })?;
    let cfg = ExperimentConfig {
        methods: vec![Method::Ngram],
        ..ExperimentConfig::default()
    };
    let (set, report) = run_experiment(&corpus.retain(|s| s.is_labeled()), &cfg)?;
    print!("{}", report.to_table());
    let unlabeled: Vec<_> = corpus.unlabeled().collect();
    let calls = infer_unlabeled(&set.models[0], &unlabeled, cfg.threshold)?;
    let b = bias_report(&corpus, &calls)?;
    print!("\n{}", b.to_text());
    let hidden = unlabeled.iter().filter(|s| truth.get(s.id()) == Some(1)).count();
    println!("true unlabeled fraction {:.4}", hidden as f64 / unlabeled.len() as f64);
    Ok(())
}
