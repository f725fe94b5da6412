//! Unigram/bigram counting and the top-k frequency vocabulary behind the
//! Ngram baseline and the class-centroid language vectors.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::chatlog::Session;
use crate::error::{Error, Result};
use crate::preprocess::turn_words;

pub const DEFAULT_TOP_K: usize = 1000;

/// Which n-gram orders to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgramOrder {
    Unigrams,
    UniAndBigrams,
}

/// All contiguous n-grams of one token run. Bigrams are joined with `_`;
/// normalized tokens never contain `_`, so the join is unambiguous.
pub fn extract_ngrams(tokens: &[String], order: NgramOrder) -> Vec<String> {
    let mut out: Vec<String> = tokens.to_vec();
    if order == NgramOrder::UniAndBigrams {
        out.extend(tokens.windows(2).map(|w| format!("{}_{}", w[0], w[1])));
    }
    out
}

/// N-grams of a whole session, extracted turn by turn so that bigrams
/// never span a speaker change.
pub fn session_ngrams(session: &Session, order: NgramOrder) -> Vec<String> {
    turn_words(session)
        .iter()
        .flat_map(|(_, words)| extract_ngrams(words, order))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramVocab {
    entries: Vec<(String, usize)>,
    index: HashMap<String, usize>,
}

impl NgramVocab {
    fn from_entries(entries: Vec<(String, usize)>) -> NgramVocab {
        let index = entries.iter().enumerate().map(|(i, (g, _))| (g.clone(), i)).collect();
        NgramVocab { entries, index }
    }

    /// Ranks by frequency descending, ties lexicographic, keeping the top `k`.
    pub fn from_counts(counts: HashMap<String, usize>, k: usize) -> NgramVocab {
        let mut entries: Vec<(String, usize)> = counts.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(k);
        NgramVocab::from_entries(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, usize)] {
        &self.entries
    }

    pub fn index_of(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).copied()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (gram, freq) in &self.entries {
            writeln!(out, "{gram}\t{freq}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn read<R: BufRead>(input: R) -> Result<NgramVocab> {
        let mut entries = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Format(format!("ngram vocab line {}: expected ngram<TAB>frequency", lineno + 1));
            let (gram, freq) = line.split_once('\t').ok_or_else(bad)?;
            let freq: usize = freq.parse().map_err(|_| bad())?;
            entries.push((gram.to_string(), freq));
        }
        let vocab = NgramVocab::from_entries(entries);
        if vocab.index.len() != vocab.entries.len() {
            return Err(Error::Format("ngram vocab: duplicate entry".into()));
        }
        Ok(vocab)
    }
}

/// Top-`k` n-grams by total frequency over the sessions.
pub fn build_ngram_vocab<'a>(sessions: impl IntoIterator<Item = &'a Session>, k: usize, order: NgramOrder) -> NgramVocab {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for session in sessions {
        for gram in session_ngrams(session, order) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    NgramVocab::from_counts(counts, k)
}

fn count_into(grams: &[String], vocab: &NgramVocab, out: &mut [f64]) {
    for gram in grams {
        if let Some(i) = vocab.index_of(gram) {
            out[i] += 1.0;
        }
    }
}

/// Raw count of each vocab entry in the session's text (both speakers).
pub fn ngram_features(session: &Session, vocab: &NgramVocab) -> Vec<f64> {
    let mut v = vec![0.0; vocab.len()];
    count_into(&session_ngrams(session, NgramOrder::UniAndBigrams), vocab, &mut v);
    v
}

/// Summed count vector over a class, scaled to unit L2 norm.
pub fn class_centroid_vector(sessions: &[&Session], vocab: &NgramVocab) -> Result<Vec<f64>> {
    if sessions.is_empty() {
        return Err(Error::InvalidInput("class centroid of an empty session list".into()));
    }
    let mut v = vec![0.0; vocab.len()];
    for s in sessions {
        count_into(&session_ngrams(s, NgramOrder::UniAndBigrams), vocab, &mut v);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(v)
}

/// `1 - cos(a, b)`; zero vectors are treated as maximally distant.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    1.0 - dot / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatlog::tests::session;
    use crate::chatlog::Speaker::{Agent, Customer};
    use proptest::prelude::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    /// Brute-force oracle: count every n-gram occurrence by direct scanning.
    fn brute_counts(texts: &[&str]) -> Vec<(String, usize)> {
        let mut all: Vec<String> = Vec::new();
        for t in texts {
            let w: Vec<&str> = t.split(' ').collect();
            for i in 0..w.len() {
                all.push(w[i].to_string());
                if i + 1 < w.len() {
                    all.push(format!("{}_{}", w[i], w[i + 1]));
                }
            }
        }
        let mut distinct = all.clone();
        distinct.sort();
        distinct.dedup();
        let mut ranked: Vec<(String, usize)> =
            distinct.into_iter().map(|g| (g.clone(), all.iter().filter(|x| **x == g).count())).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked
    }

    #[test]
    fn extract_examples() {
        assert_eq!(
            extract_ngrams(&toks(&["a", "b", "c"]), NgramOrder::UniAndBigrams),
            toks(&["a", "b", "c", "a_b", "b_c"])
        );
        assert_eq!(extract_ngrams(&toks(&["a"]), NgramOrder::UniAndBigrams), toks(&["a"]));
        assert!(extract_ngrams(&[], NgramOrder::UniAndBigrams).is_empty());
        assert_eq!(extract_ngrams(&toks(&["a", "b"]), NgramOrder::Unigrams), toks(&["a", "b"]));
    }

    #[test]
    fn vocab_tie_break() {
        let s = session("x", &[(Customer, 0.0, "a a b")], None);
        let v = build_ngram_vocab([&s], 2, NgramOrder::UniAndBigrams);
        assert_eq!(v.entries(), &[("a".to_string(), 2), ("a_a".to_string(), 1)]);
        assert_eq!(brute_counts(&["a a b"])[..2], v.entries()[..]);
        let all = build_ngram_vocab([&s], 100, NgramOrder::UniAndBigrams);
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn vocab_matches_brute_force() {
        let texts = ["x y z x", "y y z", "z x y x y"];
        let sessions: Vec<_> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| session(&format!("s{i}"), &[(Agent, 0.0, t)], None))
            .collect();
        let v = build_ngram_vocab(&sessions, 1000, NgramOrder::UniAndBigrams);
        assert_eq!(v.entries(), brute_counts(&texts).as_slice());
    }

    #[test]
    fn bigrams_stop_at_turns() {
        let s = session("x", &[(Agent, 0.0, "hello there"), (Customer, 5.0, "phone dead")], None);
        let grams = session_ngrams(&s, NgramOrder::UniAndBigrams);
        assert!(grams.contains(&"hello_there".to_string()));
        assert!(grams.contains(&"phone_dead".to_string()));
        assert!(!grams.contains(&"there_phone".to_string()));
    }

    #[test]
    fn feature_counts() {
        let train = session("t", &[(Customer, 0.0, "zebra phone")], None);
        let vocab = build_ngram_vocab([&train], 10, NgramOrder::UniAndBigrams);
        let s = session("s", &[(Agent, 0.0, "phone"), (Customer, 3.0, "phone phone")], None);
        let f = ngram_features(&s, &vocab);
        assert_eq!(f[vocab.index_of("phone").unwrap()], 3.0);
        let none = session("n", &[(Agent, 0.0, "quux")], None);
        assert!(ngram_features(&none, &vocab).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn centroid_examples() {
        let a = session("a", &[(Agent, 0.0, "apple")], None);
        let b = session("b", &[(Agent, 0.0, "banana")], None);
        let vocab = build_ngram_vocab([&a, &b], 10, NgramOrder::Unigrams);
        let c = class_centroid_vector(&[&a, &b], &vocab).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((c[vocab.index_of("appl").unwrap()] - h).abs() < 1e-12);
        assert!((c[vocab.index_of("banana").unwrap()] - h).abs() < 1e-12);
        let one = class_centroid_vector(&[&a], &vocab).unwrap();
        assert_eq!(one, class_centroid_vector(&[&a, &a], &vocab).unwrap());
        assert!(class_centroid_vector(&[], &vocab).is_err());
    }

    #[test]
    fn vocab_text_round_trip() {
        let s = session("x", &[(Customer, 0.0, "my phone is dead dead")], None);
        let v = build_ngram_vocab([&s], 1000, NgramOrder::UniAndBigrams);
        let back = NgramVocab::read(v.to_text().as_bytes()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn cosine_distance_basics() {
        assert!(cosine_distance(&[1.0, 2.0], &[2.0, 4.0]).abs() < 1e-12);
        assert!((cosine_distance(&[1.0, 0.0], &[0.0, 3.0]) - 1.0).abs() < 1e-12);
    }

    fn word() -> impl Strategy<Value = String> {
        prop_oneof![Just("cat"), Just("dog"), Just("fish"), Just("bird")].prop_map(String::from)
    }

    proptest! {
        #[test]
        fn ngram_count_identity(words in proptest::collection::vec(word(), 0..20)) {
            let t = words.len();
            prop_assert_eq!(extract_ngrams(&words, NgramOrder::UniAndBigrams).len(), t + t.saturating_sub(1));
        }

        #[test]
        fn vocab_order_invariant(texts in proptest::collection::vec(proptest::collection::vec(word(), 1..6), 1..6), k in 1usize..12) {
            let sessions: Vec<_> = texts.iter().enumerate()
                .map(|(i, w)| session(&format!("s{i}"), &[(Agent, 0.0, &w.join(" "))], None))
                .collect();
            let fwd = build_ngram_vocab(&sessions, k, NgramOrder::UniAndBigrams);
            let rev = build_ngram_vocab(sessions.iter().rev(), k, NgramOrder::UniAndBigrams);
            prop_assert_eq!(&fwd, &rev);
            prop_assert!(fwd.len() <= k);
        }

        #[test]
        fn features_additive_and_centroid_unit(a in proptest::collection::vec(word(), 1..8), b in proptest::collection::vec(word(), 1..8)) {
            let sa = session("a", &[(Customer, 0.0, &a.join(" "))], None);
            let sb = session("b", &[(Agent, 0.0, &b.join(" "))], None);
            let both = session("ab", &[(Customer, 0.0, &a.join(" ")), (Agent, 1.0, &b.join(" "))], None);
            let vocab = build_ngram_vocab([&sa, &sb], 50, NgramOrder::UniAndBigrams);
            let (fa, fb, fab) = (ngram_features(&sa, &vocab), ngram_features(&sb, &vocab), ngram_features(&both, &vocab));
            for i in 0..vocab.len() {
                prop_assert_eq!(fab[i], fa[i] + fb[i]);
            }
            let c = class_centroid_vector(&[&sa, &sb], &vocab).unwrap();
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
