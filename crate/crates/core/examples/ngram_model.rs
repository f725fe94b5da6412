//! Top-k unigram and bigram features with an L1-regularized logistic
//! regression; prints the heaviest weights.

use chatsat::baselines::L1Config;
use chatsat::eval::{compute_metrics, make_split, threshold_calls, NgramClassifier, SessionClassifier};
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    let (corpus, _) = generate(&GenSpec {
        n_sessions: 1500,
        labeled_fraction: 1.0,
        ..GenSpec::default()
    })?;
    let ids: Vec<String> = corpus.sessions().iter().map(|s| s.id().to_string()).collect();
    let split = make_split(&ids, 0)?;
    let pick = |ids: &[String]| ids.iter().map(|id| corpus.sessions().iter().find(|s| s.id() == id).unwrap()).collect::<Vec<_>>();
    let train = pick(&split.train);
    let labels: Vec<u8> = train.iter().map(|s| s.label().unwrap()).collect();
    let clf = NgramClassifier::train(&train, &labels, 1000, &L1Config::default())?;
    println!("{} n-grams, {} nonzero weights", clf.vocab.len(), clf.model.nonzero());
    let mut weights: Vec<(&str, f64)> = clf
        .vocab
        .entries()
        .iter()
        .zip(&clf.model.w)
        .map(|((g, _), &w)| (g.as_str(), w))
        .collect();
    weights.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    for (g, w) in weights.iter().take(10) {
        println!("  {w:>8.3}  {g}");
    }
    let test = pick(&split.test);
    let y: Vec<u8> = test.iter().map(|s| s.label().unwrap()).collect();
    let m = compute_metrics(&threshold_calls(&clf.predict_proba(&test)?, 0.5), &y)?;
    println!("test accuracy {:.3} F1 {:.3}", m.accuracy, m.f1);
    Ok(())
}
