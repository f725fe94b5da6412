//! Descriptive statistics, gap percentiles and rating-class distances.

use chatsat::chatlog::corpus_stats;
use chatsat::eval::rating_distance_analysis;
use chatsat::preprocess::compute_gap_thresholds;
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    let (corpus, _) = generate(&GenSpec {
        n_sessions: 3000,
        labeled_fraction: 1.0,
        ..GenSpec::default()
    })?;
    let st = corpus_stats(&corpus);
    println!("{} sessions, {} labeled", st.sessions, st.labeled);
    for (name, s) in [("minutes", st.duration_minutes), ("utterances", st.utterances), ("words", st.words)] {
        let s = s.expect("non-empty corpus");
        println!("{name:<11} mean {:>7.2} median {:>7.2} min {:>7.2} max {:>7.2}", s.mean, s.median, s.min, s.max);
    }
    println!("stars 1..5: {:?}", st.rating_histogram);
    println!("gap thresholds: {}", compute_gap_thresholds(&corpus)?.to_text().trim().replace('\n', ", "));
    let labeled: Vec<_> = corpus.labeled().collect();
    let d = rating_distance_analysis(&labeled, 0.5, 0)?;
    println!("cosine distance from Average ({} sampled sessions):", d.sample_size);
    for (class, dist) in &d.distances {
        println!("  {class:<10} {dist:.4}");
    }
    Ok(())
}
