//! Generates a small synthetic corpus and writes it as JSONL and XML.
//!
//! cargo run --example generate_corpus -- [out_dir]

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use chatsat::chatlog::{write_sessions, Format};
use chatsat::synthcorpus::{generate, GenSpec};

fn main() -> chatsat::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/example_corpus".into()));
    std::fs::create_dir_all(&out)?;
    let spec = GenSpec {
        n_sessions: 200,
        labeled_fraction: 0.5,
        ..GenSpec::default()
    };
    print!("{}", spec.to_text());
    let (corpus, truth) = generate(&spec)?;
    write_sessions(&corpus, Format::Jsonl, BufWriter::new(File::create(out.join("corpus.jsonl"))?))?;
    write_sessions(&corpus, Format::Xml, BufWriter::new(File::create(out.join("corpus.xml"))?))?;
    truth.write(BufWriter::new(File::create(out.join("ground_truth.json"))?))?;
    let first = &corpus.sessions()[0];
    println!("\n{} sessions written to {}", corpus.len(), out.display());
    println!("first session {} ({} utterances):", first.id(), first.utterances().len());
    for u in first.utterances().iter().take(6) {
        println!("  {:>7.1}s {:<8} {}", u.t, u.speaker.as_str(), u.text);
    }
    Ok(())
}
