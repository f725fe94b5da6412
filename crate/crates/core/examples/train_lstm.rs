//! Trains one time-aware LSTM, prints the epoch history, and reloads the
//! saved checkpoint.
//!
//! cargo run --release --example train_lstm -- [n_sessions]

use chatsat::eval::{compute_metrics, make_split, threshold_calls, NeuralClassifier, SessionClassifier};
use chatsat::nnet::{CellType, ModelCheckpoint, ModelConfig};
use chatsat::preprocess::Artifacts;
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    let n = std::env::args().nth(1).map_or(1500, |s| s.parse().expect("n_sessions"));
    let (corpus, _) = generate(&GenSpec {
        n_sessions: n,
        labeled_fraction: 1.0,
        ..GenSpec::default()
    })?;
    let ids: Vec<String> = corpus.sessions().iter().map(|s| s.id().to_string()).collect();
    let split = make_split(&ids, 0)?;
    let pick = |ids: &[String]| {
        ids.iter()
            .map(|id| corpus.sessions().iter().find(|s| s.id() == id).unwrap())
            .map(|s| (s, s.label().unwrap()))
            .collect::<Vec<_>>()
    };
    let (train, val, test) = (pick(&split.train), pick(&split.val), pick(&split.test));
    let artifacts = Artifacts::fit(&corpus.retain(|s| split.train.iter().any(|id| id == s.id())), 5)?;
    let mut cfg = ModelConfig::new(CellType::Lstm, true, artifacts.vocab.len());
    cfg.hidden_dim = 32;
    cfg.embed_dim = 24;
    cfg.max_epochs = 8;
    let clf = NeuralClassifier::train(&train, &val, artifacts, &cfg)?;
    for e in &clf.checkpoint.history {
        println!("epoch {:>2} train {:.4} val {:.4}", e.epoch, e.train_loss, e.val_loss);
    }
    println!("best epoch {}", clf.checkpoint.best_epoch);
    let path = std::env::temp_dir().join("chatsat_example_lstm.model");
    clf.checkpoint.save(&path)?;
    let reloaded = NeuralClassifier::from_checkpoint(ModelCheckpoint::load(&path)?)?;
    let sessions: Vec<_> = test.iter().map(|(s, _)| *s).collect();
    let y: Vec<u8> = test.iter().map(|(_, y)| *y).collect();
    let probs = reloaded.predict_proba(&sessions)?;
    assert_eq!(probs, clf.predict_proba(&sessions)?);
    let m = compute_metrics(&threshold_calls(&probs, 0.5), &y)?;
    println!("{} test: accuracy {:.3} precision {:.3} recall {:.3} F1 {:.3}", reloaded.name(), m.accuracy, m.precision, m.recall, m.f1);
    Ok(())
}
