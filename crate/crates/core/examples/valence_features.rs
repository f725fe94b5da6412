//! Lexicon scores for single texts and the eight quarter-by-speaker
//! affect features of one session.

use chatsat::chatlog::Speaker;
use chatsat::synthcorpus::{generate, GenSpec};
use chatsat::valence::{affect_features, score_text, Lexicon};

fn main() -> chatsat::Result<()> {
    let lex = Lexicon::builtin();
    println!("lexicon: {} terms, fingerprint {}", lex.len(), &lex.fingerprint()[..12]);
    for text in [
        "thanks, that was really helpful",
        "this is useless and I am very frustrated",
        "not bad at all",
        "the router blinks green",
    ] {
        println!("{:>7.3}  {text}", score_text(text, &lex));
    }
    let (corpus, _) = generate(&GenSpec {
        n_sessions: 50,
        labeled_fraction: 1.0,
        ..GenSpec::default()
    })?;
    for s in corpus.sessions().iter().take(4) {
        let f = affect_features(s, &lex);
        let row = |sp| (0..4).map(|q| format!("{:>6.2}", f.get(sp, q))).collect::<String>();
        println!("{} label {:?}", s.id(), s.label());
        println!("  agent    {}", row(Speaker::Agent));
        println!("  customer {}", row(Speaker::Customer));
    }
    Ok(())
}
