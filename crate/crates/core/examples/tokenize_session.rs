//! Shows turn consolidation, gap tokens and the padded id sequence for one
//! session.

use chatsat::preprocess::{consolidate_turns, turn_gaps, Artifacts, GapToken};
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    let (corpus, _) = generate(&GenSpec {
        n_sessions: 300,
        ..GenSpec::default()
    })?;
    let art = Artifacts::fit(&corpus, 5)?;
    println!("vocabulary {} tokens; {}", art.vocab.len(), art.thresholds.to_text().trim().replace('\n', ", "));
    let s = &corpus.sessions()[3];
    let turns = consolidate_turns(s);
    println!("{}: {} utterances, {} turns", s.id(), s.utterances().len(), turns.len());
    for (speaker, gap) in turn_gaps(&turns) {
        let tok = chatsat::preprocess::gap_token(gap, speaker, &art.thresholds);
        println!("  {:<8} responds after {gap:>6.1}s -> {}", speaker.as_str(), tok.name());
    }
    let seq = art.encode(s, true, 200)?;
    println!("padding {} of {}", seq.pad_len(), seq.max_len());
    let shown: Vec<String> = seq
        .tail()
        .iter()
        .map(|&id| match GapToken::from_id(id) {
            Some(g) => g.name(),
            None => art.vocab.token(id).unwrap_or("?").to_string(),
        })
        .collect();
    println!("{}", shown.join(" "));
    Ok(())
}
