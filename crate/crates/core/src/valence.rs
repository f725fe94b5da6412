//! Lexicon sentiment scoring and the 8 quarter-aggregated affect features.
//!
//! Scoring keeps two pieces of the usual rule-based valence approach: a
//! three-token negation window that flips a hit's sign, and the
//! `s / sqrt(s^2 + 15)` squashing of the summed score. Lexicon terms are
//! normalized with the same pipeline as chat text, so entries match
//! stemmed tokens; terms sharing a stem are averaged.

use std::collections::HashMap;
use std::io::BufRead;

use crate::chatlog::{Session, Speaker};
use crate::error::{Error, Result};
use crate::preprocess::{self, normalize_text};

/// Squashing constant of the normalization `s / sqrt(s^2 + alpha)`.
pub const ALPHA: f64 = 15.0;
/// Number of preceding tokens searched for a negator.
pub const NEGATION_WINDOW: usize = 3;

const BUILTIN_LEXICON: &str = include_str!("../data/lexicon.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    scores: HashMap<String, f64>,
    raw_terms: usize,
}

impl Lexicon {
    /// `term<TAB>score` lines; `#` starts a comment. Entries that do not
    /// normalize to exactly one token are skipped.
    pub fn read<R: BufRead>(input: R) -> Result<Lexicon> {
        let mut raw: HashMap<String, f64> = HashMap::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let (term, score) = line
                .split_once('\t')
                .ok_or_else(|| Error::Format(format!("lexicon line {}: expected term<TAB>score", lineno + 1)))?;
            let term = term.trim().to_lowercase();
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("lexicon line {}: bad score {score:?}", lineno + 1)))?;
            if !score.is_finite() {
                return Err(Error::Format(format!("lexicon line {}: non-finite score", lineno + 1)));
            }
            if raw.insert(term.clone(), score).is_some() {
                return Err(Error::Format(format!("lexicon: duplicate term {term:?}")));
            }
        }
        Ok(Lexicon::from_terms(raw))
    }

    pub fn from_terms<I, S>(terms: I) -> Lexicon
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut sums: HashMap<String, (f64, usize)> = HashMap::new();
        let mut raw_terms = 0;
        for (term, score) in terms {
            raw_terms += 1;
            let tokens = normalize_text(term.as_ref());
            if let [token] = tokens.as_slice() {
                let e = sums.entry(token.clone()).or_insert((0.0, 0));
                e.0 += score;
                e.1 += 1;
            }
        }
        Lexicon {
            scores: sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect(),
            raw_terms,
        }
    }

    /// The lexicon shipped with the crate.
    pub fn builtin() -> Lexicon {
        Lexicon::read(BUILTIN_LEXICON.as_bytes()).expect("bundled lexicon parses")
    }

    pub fn load(path: &std::path::Path) -> Result<Lexicon> {
        Lexicon::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn score(&self, token: &str) -> Option<f64> {
        self.scores.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Same lexicon with every score negated.
    pub fn negated(&self) -> Lexicon {
        Lexicon {
            scores: self.scores.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            raw_terms: self.raw_terms,
        }
    }

    pub fn fingerprint(&self) -> String {
        let mut entries: Vec<_> = self.scores.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let text: String = entries.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect();
        preprocess::fingerprint(text.as_bytes())
    }
}

fn is_negator(token: &str) -> bool {
    matches!(token, "not" | "no" | "never") || token.ends_with("n't")
}

/// Unsquashed sum of lexicon hits with negation flips.
pub fn raw_score(tokens: &[String], lexicon: &Lexicon) -> f64 {
    let mut sum = 0.0;
    for (i, tok) in tokens.iter().enumerate() {
        if let Some(v) = lexicon.score(tok) {
            let window = &tokens[i.saturating_sub(NEGATION_WINDOW)..i];
            let negated = window.iter().any(|t| is_negator(t));
            sum += if negated { -v } else { v };
        }
    }
    sum
}

pub fn squash(sum: f64) -> f64 {
    sum / (sum * sum + ALPHA).sqrt()
}

/// Valence in (-1, 1); 0 when nothing in the text is in the lexicon.
pub fn score_text(text: &str, lexicon: &Lexicon) -> f64 {
    squash(raw_score(&normalize_text(text), lexicon))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Mean,
    Sum,
}

/// `[agent Q1..Q4, customer Q1..Q4]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AffectFeatures(pub [f64; 8]);

impl AffectFeatures {
    pub fn get(&self, speaker: Speaker, quarter: usize) -> f64 {
        self.0[slot(speaker, quarter)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn slot(speaker: Speaker, quarter: usize) -> usize {
    let base = match speaker {
        Speaker::Agent => 0,
        Speaker::Customer => 4,
    };
    base + quarter
}

/// Quarter (0..4) of the session duration containing offset `t`; the final
/// boundary belongs to the last quarter. Zero-length sessions map to 0.
pub fn quarter_of(t: f64, duration: f64) -> usize {
    if duration <= 0.0 {
        return 0;
    }
    ((4.0 * t / duration).floor().max(0.0) as usize).min(3)
}

pub fn affect_features(session: &Session, lexicon: &Lexicon) -> AffectFeatures {
    affect_features_with(session, lexicon, Aggregation::Mean)
}

pub fn affect_features_with(session: &Session, lexicon: &Lexicon, aggregation: Aggregation) -> AffectFeatures {
    let duration = session.duration_secs();
    let mut sums = [0.0; 8];
    let mut counts = [0usize; 8];
    for u in session.utterances() {
        let k = slot(u.speaker, quarter_of(u.t, duration));
        sums[k] += score_text(&u.text, lexicon);
        counts[k] += 1;
    }
    let mut out = [0.0; 8];
    for k in 0..8 {
        out[k] = match aggregation {
            Aggregation::Sum => sums[k],
            Aggregation::Mean if counts[k] > 0 => sums[k] / counts[k] as f64,
            Aggregation::Mean => 0.0,
        };
    }
    AffectFeatures(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatlog::tests::session;
    use proptest::prelude::*;
    use Speaker::*;

    fn good() -> Lexicon {
        Lexicon::from_terms([("good", 1.9)])
    }

    #[test]
    fn squashing_examples() {
        assert_eq!(score_text("", &good()), 0.0);
        let expected = 1.9 / (1.9f64 * 1.9 + 15.0).sqrt();
        assert_eq!(score_text("good", &good()), expected);
        assert_eq!(score_text("not good", &good()), -expected);
        assert_eq!(score_text("This is not very good", &good()), -expected);
        assert_eq!(score_text("not that very much good", &good()), expected);
        assert_eq!(score_text("wasn't good", &good()), -expected);
        assert_eq!(score_text("nothing here", &good()), 0.0);
    }

    #[test]
    fn lexicon_file_parsing() {
        let text = "# comment\ngood\t1.9\nterrible\t-2.5  # trailing\n\n:)\t2.0\n";
        let lex = Lexicon::read(text.as_bytes()).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.score("terribl"), Some(-2.5));
        assert!(Lexicon::read("good\t1\ngood\t2\n".as_bytes()).is_err());
        assert!(Lexicon::read("good 1\n".as_bytes()).is_err());
    }

    #[test]
    fn builtin_lexicon_loads() {
        let lex = Lexicon::builtin();
        assert!(lex.len() > 100);
        assert!(lex.score("useless").unwrap() < 0.0);
        assert!(lex.score("great").unwrap() > 0.0);
    }

    #[test]
    fn quarter_assignment() {
        // Session spans 0..100 s; one customer utterance at 99 s.
        let target = 0.5;
        // raw sum s with s / sqrt(s^2 + 15) = 0.5  =>  s = sqrt(5)
        let lex_half = Lexicon::from_terms([("meh", 5.0f64.sqrt())]);
        assert!((score_text("meh", &lex_half) - target).abs() < 1e-15);
        let s = session("q", &[(Agent, 0.0, "fine"), (Customer, 99.0, "meh"), (Agent, 100.0, "fine")], None);
        let f = affect_features(&s, &lex_half);
        assert_eq!(f.get(Customer, 3), score_text("meh", &lex_half));
        assert_eq!(f.0.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(quarter_of(100.0, 100.0), 3);
        assert_eq!(quarter_of(25.0, 100.0), 1);
        assert_eq!(quarter_of(5.0, 0.0), 0);
    }

    #[test]
    fn quarter_mean() {
        let lex = Lexicon::from_terms([("a", 1.0), ("b", 2.0)]);
        let (sa, sb) = (score_text("a", &lex), score_text("b", &lex));
        let s = session("m", &[(Agent, 0.0, "a"), (Agent, 1.0, "b"), (Customer, 100.0, "zzz")], None);
        let f = affect_features(&s, &lex);
        assert_eq!(f.get(Agent, 0), (sa + sb) / 2.0);
        let summed = affect_features_with(&s, &lex, Aggregation::Sum);
        assert_eq!(summed.get(Agent, 0), sa + sb);
    }

    #[test]
    fn no_hits_zero_vector() {
        let s = session("z", &[(Agent, 0.0, "hello"), (Customer, 10.0, "phone")], None);
        assert_eq!(affect_features(&s, &good()), AffectFeatures::default());
    }

    proptest! {
        #[test]
        fn score_bounded_and_odd(
            words in proptest::collection::vec(prop_oneof!["good", "bad", "not", "okay", "never", "fine"], 0..12),
            g in -4.0f64..4.0, b in -4.0f64..4.0,
        ) {
            let lex = Lexicon::from_terms([("good", g), ("bad", b), ("fine", 0.7)]);
            let text = words.join(" ");
            let v = score_text(&text, &lex);
            prop_assert!(v > -1.0 && v < 1.0);
            prop_assert_eq!(score_text(&text, &lex.negated()), -v);
        }

        #[test]
        fn permuting_within_quarter_is_invariant(perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle()) {
            let lex = Lexicon::builtin();
            let texts = ["great thanks", "this is useless", "not happy at all", "ok"];
            let base: Vec<(Speaker, f64, &str)> = (0..4).map(|i| (Customer, i as f64, texts[i])).collect();
            let mut shuffled = base.clone();
            for (slot, &src) in perm.iter().enumerate() {
                shuffled[slot] = (Customer, slot as f64, texts[src]);
            }
            let tail = [(Agent, 100.0, "bye")];
            let a = session("p", &[base.as_slice(), &tail].concat(), None);
            let b = session("p", &[shuffled.as_slice(), &tail].concat(), None);
            let (fa, fb) = (affect_features(&a, &lex), affect_features(&b, &lex));
            for k in 0..8 {
                prop_assert!((fa.0[k] - fb.0[k]).abs() < 1e-12);
            }
        }
    }
}
