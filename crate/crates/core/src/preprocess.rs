//! Session → fixed-length id sequence.
//!
//! Utterances are merged into speaker turns; between two turns an optional
//! gap token records how long the responding speaker took, bucketed at the
//! corpus-wide 25th/75th percentiles of that speaker's response gaps. Words
//! are lowercased, stripped to `[a-z0-9']`, stemmed, and looked up in a
//! frequency-thresholded vocabulary.
//!
//! Reserved ids: `0` PAD, `1` UNK, `2..=7` the six gap tokens
//! (Short/Medium/Long for Agent, then for Customer). Word ids start at 8.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use sha2::{Digest, Sha256};

use crate::chatlog::{Corpus, Session, Speaker};
use crate::error::{Error, Result};
use crate::stem;

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const PAD_TOKEN: &str = "<PAD>";
pub const UNK_TOKEN: &str = "<UNK>";
pub const FIRST_WORD_ID: u32 = 8;
pub const DEFAULT_MAX_LEN: usize = 500;
pub const DEFAULT_MIN_FREQUENCY: usize = 5;

/// Consecutive same-speaker utterances merged into one block.
#[derive(Debug, Clone, PartialEq)]
pub struct Turn {
    pub speaker: Speaker,
    pub text: String,
    pub start_ts: f64,
    pub end_ts: f64,
}

pub fn consolidate_turns(session: &Session) -> Vec<Turn> {
    let mut turns: Vec<Turn> = Vec::new();
    for u in session.utterances() {
        match turns.last_mut() {
            Some(turn) if turn.speaker == u.speaker => {
                if !turn.text.is_empty() && !u.text.is_empty() {
                    turn.text.push(' ');
                }
                turn.text.push_str(&u.text);
                turn.end_ts = u.t;
            }
            _ => turns.push(Turn {
                speaker: u.speaker,
                text: u.text.clone(),
                start_ts: u.t,
                end_ts: u.t,
            }),
        }
    }
    turns
}

/// Response gaps between adjacent turns, attributed to the responder.
/// Overlapping timestamps clamp to zero.
pub fn turn_gaps(turns: &[Turn]) -> impl Iterator<Item = (Speaker, f64)> + '_ {
    turns
        .windows(2)
        .map(|w| (w[1].speaker, (w[1].start_ts - w[0].end_ts).max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GapBucket {
    Short,
    Medium,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapToken {
    pub bucket: GapBucket,
    pub responder: Speaker,
}

impl GapToken {
    pub const ALL: [GapToken; 6] = [
        GapToken::new(GapBucket::Short, Speaker::Agent),
        GapToken::new(GapBucket::Medium, Speaker::Agent),
        GapToken::new(GapBucket::Long, Speaker::Agent),
        GapToken::new(GapBucket::Short, Speaker::Customer),
        GapToken::new(GapBucket::Medium, Speaker::Customer),
        GapToken::new(GapBucket::Long, Speaker::Customer),
    ];

    pub const fn new(bucket: GapBucket, responder: Speaker) -> Self {
        GapToken { bucket, responder }
    }

    pub fn id(self) -> u32 {
        let speaker = match self.responder {
            Speaker::Agent => 0,
            Speaker::Customer => 3,
        };
        let bucket = match self.bucket {
            GapBucket::Short => 0,
            GapBucket::Medium => 1,
            GapBucket::Long => 2,
        };
        2 + speaker + bucket
    }

    pub fn from_id(id: u32) -> Option<GapToken> {
        (2..FIRST_WORD_ID).contains(&id).then(|| GapToken::ALL[(id - 2) as usize])
    }

    pub fn name(self) -> String {
        format!("{:?}_{}", self.bucket, self.responder)
    }
}

impl fmt::Display for GapToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}", self.bucket, self.responder)
    }
}

/// Per-responder percentile boundaries, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapThresholds {
    pub agent_p25: f64,
    pub agent_p75: f64,
    pub customer_p25: f64,
    pub customer_p75: f64,
}

impl GapThresholds {
    pub fn new(agent_p25: f64, agent_p75: f64, customer_p25: f64, customer_p75: f64) -> Result<Self> {
        let t = GapThresholds {
            agent_p25,
            agent_p75,
            customer_p25,
            customer_p75,
        };
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi;
        if !ok(agent_p25, agent_p75) || !ok(customer_p25, customer_p75) {
            return Err(Error::InvalidInput(format!("invalid gap thresholds {t:?}")));
        }
        Ok(t)
    }

    pub fn for_responder(&self, responder: Speaker) -> (f64, f64) {
        match responder {
            Speaker::Agent => (self.agent_p25, self.agent_p75),
            Speaker::Customer => (self.customer_p25, self.customer_p75),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "agent_p25 = {}\nagent_p75 = {}\ncustomer_p25 = {}\ncustomer_p75 = {}\n",
            self.agent_p25, self.agent_p75, self.customer_p25, self.customer_p75
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values: HashMap<&str, f64> = HashMap::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("thresholds: expected key = value, got {line:?}")))?;
            let key = key.trim();
            if !["agent_p25", "agent_p75", "customer_p25", "customer_p75"].contains(&key) {
                return Err(Error::Format(format!("thresholds: unknown key {key:?}")));
            }
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("thresholds: bad number for {key}")))?;
            values.insert(key, v);
        }
        let get = |k: &str| {
            values
                .get(k)
                .copied()
                .ok_or_else(|| Error::Format(format!("thresholds: missing {k}")))
        };
        GapThresholds::new(get("agent_p25")?, get("agent_p75")?, get("customer_p25")?, get("customer_p75")?)
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(self.to_text().as_bytes())
    }
}

pub(crate) fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Nearest-rank percentile: the `ceil(p * n)`-th smallest value (1-based).
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty sample");
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn compute_gap_thresholds(corpus: &Corpus) -> Result<GapThresholds> {
    let mut agent = Vec::new();
    let mut customer = Vec::new();
    for s in corpus.sessions() {
        let turns = consolidate_turns(s);
        for (responder, gap) in turn_gaps(&turns) {
            match responder {
                Speaker::Agent => agent.push(gap),
                Speaker::Customer => customer.push(gap),
            }
        }
    }
    if agent.is_empty() {
        return Err(Error::NoGaps(Speaker::Agent));
    }
    if customer.is_empty() {
        return Err(Error::NoGaps(Speaker::Customer));
    }
    agent.sort_by(f64::total_cmp);
    customer.sort_by(f64::total_cmp);
    GapThresholds::new(
        nearest_rank(&agent, 0.25),
        nearest_rank(&agent, 0.75),
        nearest_rank(&customer, 0.25),
        nearest_rank(&customer, 0.75),
    )
}

pub fn gap_token(gap: f64, responder: Speaker, thresholds: &GapThresholds) -> GapToken {
    let gap = gap.max(0.0);
    let (p25, p75) = thresholds.for_responder(responder);
    let bucket = if gap < p25 {
        GapBucket::Short
    } else if gap < p75 {
        GapBucket::Medium
    } else {
        GapBucket::Long
    };
    GapToken::new(bucket, responder)
}

fn normalize_token(raw: &str) -> Option<String> {
    let mut token = raw.trim_matches('\'').to_string();
    // Stemming can expose a trailing apostrophe (`it's` -> `it'`), so
    // trim and stem until stable.
    for _ in 0..8 {
        if token.is_empty() {
            return None;
        }
        let next = stem::stem(&token).trim_matches('\'').to_string();
        if next == token {
            break;
        }
        token = next;
    }
    (!token.is_empty()).then_some(token)
}

/// Lowercase, replace everything outside `[a-z0-9']` with spaces, split,
/// trim edge apostrophes, and stem.
pub fn normalize_text(text: &str) -> Vec<String> {
    let cleaned: String = text
        .to_lowercase()
        .chars()
        .map(|c| {
            if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\'' {
                c
            } else {
                ' '
            }
        })
        .collect();
    cleaned.split_whitespace().filter_map(normalize_token).collect()
}

/// Normalized words per consolidated turn.
pub fn turn_words(session: &Session) -> Vec<(Turn, Vec<String>)> {
    consolidate_turns(session)
        .into_iter()
        .map(|t| {
            let words = normalize_text(&t.text);
            (t, words)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    pub min_frequency: usize,
}

impl Vocab {
    fn with_words(words: impl IntoIterator<Item = String>, min_frequency: usize) -> Result<Vocab> {
        let mut tokens: Vec<String> = vec![PAD_TOKEN.into(), UNK_TOKEN.into()];
        tokens.extend(GapToken::ALL.iter().map(|g| g.name()));
        tokens.extend(words);
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::Format(format!("vocab: duplicate token {t:?}")));
            }
        }
        Ok(Vocab {
            tokens,
            index,
            min_frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word_count(&self) -> usize {
        self.tokens.len() - FIRST_WORD_ID as usize
    }

    /// Id of a normalized word; UNK when absent. Reserved names never match
    /// because normalized words are lowercase.
    pub fn id(&self, word: &str) -> u32 {
        match self.index.get(word) {
            Some(&id) if id >= FIRST_WORD_ID => id,
            _ => UNK_ID,
        }
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Tokens of the unpadded tail.
    pub fn decode(&self, seq: &TokenSequence) -> Vec<&str> {
        seq.tail().iter().map(|&id| self.token(id).unwrap_or(UNK_TOKEN)).collect()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# min_frequency {}", self.min_frequency)?;
        for (id, t) in self.tokens.iter().enumerate() {
            writeln!(out, "{t}\t{id}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn read<R: BufRead>(input: R) -> Result<Vocab> {
        let mut min_frequency = DEFAULT_MIN_FREQUENCY;
        let mut rows: Vec<(String, u32)> = Vec::new();
        for line in input.lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("min_frequency") {
                    min_frequency = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Format("vocab: bad min_frequency header".into()))?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (tok, id) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::Format(format!("vocab: expected token<TAB>id, got {line:?}")))?;
            let id: u32 = id.parse().map_err(|_| Error::Format(format!("vocab: bad id in {line:?}")))?;
            rows.push((tok.to_string(), id));
        }
        for (expected, (tok, id)) in rows.iter().enumerate() {
            if *id as usize != expected {
                return Err(Error::Format(format!("vocab: ids must be dense and ordered; {tok:?} has id {id}")));
            }
        }
        let reserved_ok = rows.len() >= FIRST_WORD_ID as usize
            && rows[0].0 == PAD_TOKEN
            && rows[1].0 == UNK_TOKEN
            && GapToken::ALL.iter().all(|g| rows[g.id() as usize].0 == g.name());
        if !reserved_ok {
            return Err(Error::Format("vocab: reserved tokens missing or out of place".into()));
        }
        Vocab::with_words(
            rows.into_iter().skip(FIRST_WORD_ID as usize).map(|(t, _)| t),
            min_frequency,
        )
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(self.to_text().as_bytes())
    }
}

/// Words with corpus frequency `>= min_frequency` get ids, ordered by
/// descending frequency then lexicographically.
pub fn build_vocab(corpus: &Corpus, min_frequency: usize) -> Vocab {
    let min_frequency = min_frequency.max(1);
    let mut counts: HashMap<String, usize> = HashMap::new();
    for s in corpus.sessions() {
        for u in s.utterances() {
            for w in normalize_text(&u.text) {
                *counts.entry(w).or_default() += 1;
            }
        }
    }
    let mut words: Vec<(String, usize)> = counts.into_iter().filter(|(_, c)| *c >= min_frequency).collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Vocab::with_words(words.into_iter().map(|(w, _)| w), min_frequency).expect("normalized words are unique")
}

/// Fixed-length model input. Padding sits at the front.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
    pub true_length: usize,
    pub label: Option<u8>,
}

impl TokenSequence {
    pub fn max_len(&self) -> usize {
        self.ids.len()
    }

    pub fn pad_len(&self) -> usize {
        self.ids.len() - self.true_length
    }

    pub fn tail(&self) -> &[u32] {
        &self.ids[self.pad_len()..]
    }

    /// Front-pads or keeps the last `max_len` ids.
    pub fn from_stream(stream: &[u32], max_len: usize, label: Option<u8>) -> TokenSequence {
        let kept = &stream[stream.len().saturating_sub(max_len)..];
        let mut ids = vec![PAD_ID; max_len - kept.len()];
        ids.extend_from_slice(kept);
        TokenSequence {
            ids,
            true_length: kept.len(),
            label,
        }
    }
}

/// Unpadded, untruncated id stream: turn words with a gap token before each
/// responding turn when `include_time` is set.
pub fn encode_stream(session: &Session, vocab: &Vocab, thresholds: &GapThresholds, include_time: bool) -> Vec<u32> {
    let mut stream = Vec::new();
    let mut prev_end: Option<f64> = None;
    for (turn, words) in turn_words(session) {
        if include_time {
            if let Some(end) = prev_end {
                stream.push(gap_token(turn.start_ts - end, turn.speaker, thresholds).id());
            }
        }
        stream.extend(words.iter().map(|w| vocab.id(w)));
        prev_end = Some(turn.end_ts);
    }
    stream
}

pub fn encode_session(
    session: &Session,
    vocab: &Vocab,
    thresholds: &GapThresholds,
    include_time: bool,
    max_len: usize,
) -> Result<TokenSequence> {
    if max_len == 0 {
        return Err(Error::InvalidInput("max_len must be positive".into()));
    }
    let stream = encode_stream(session, vocab, thresholds, include_time);
    if stream.is_empty() {
        return Err(Error::EmptyEncoding(session.id().to_string()));
    }
    Ok(TokenSequence::from_stream(&stream, max_len, session.label()))
}

/// Vocabulary and gap thresholds fitted on one training corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub vocab: Vocab,
    pub thresholds: GapThresholds,
}

impl Artifacts {
    pub fn fit(corpus: &Corpus, min_frequency: usize) -> Result<Artifacts> {
        Ok(Artifacts {
            vocab: build_vocab(corpus, min_frequency),
            thresholds: compute_gap_thresholds(corpus)?,
        })
    }

    pub fn encode(&self, session: &Session, include_time: bool, max_len: usize) -> Result<TokenSequence> {
        encode_session(session, &self.vocab, &self.thresholds, include_time, max_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatlog::tests::session;
    use proptest::prelude::*;
    use Speaker::*;

    fn thresholds() -> GapThresholds {
        // Agent / customer 25th and 75th percentiles.
        GapThresholds::new(12.0, 49.0, 13.0, 51.0).unwrap()
    }

    #[test]
    fn consolidation_merges_runs() {
        let s = session(
            "x",
            &[(Agent, 0.0, "hi"), (Agent, 5.0, "how can I help"), (Customer, 20.0, "phone broken")],
            None,
        );
        let turns = consolidate_turns(&s);
        assert_eq!(
            turns,
            vec![
                Turn { speaker: Agent, text: "hi how can I help".into(), start_ts: 0.0, end_ts: 5.0 },
                Turn { speaker: Customer, text: "phone broken".into(), start_ts: 20.0, end_ts: 20.0 },
            ]
        );
        let single = session("y", &[(Customer, 3.0, "hello")], None);
        assert_eq!(consolidate_turns(&single).len(), 1);
        let alt = session("z", &[(Agent, 0.0, "a"), (Customer, 1.0, "b"), (Agent, 2.0, "c")], None);
        let turns = consolidate_turns(&alt);
        assert_eq!(turns.len(), 3);
        for (t, u) in turns.iter().zip(alt.utterances()) {
            assert_eq!((t.speaker, t.text.as_str(), t.start_ts, t.end_ts), (u.speaker, u.text.as_str(), u.t, u.t));
        }
    }

    /// Sessions whose response gaps are exactly `agent` and `customer`.
    fn corpus_with_gaps(agent: &[f64], customer: &[f64]) -> Corpus {
        let mut sessions = Vec::new();
        for (i, &g) in agent.iter().enumerate() {
            sessions.push(session(&format!("a{i}"), &[(Customer, 0.0, "q"), (Agent, g, "r")], None));
        }
        for (i, &g) in customer.iter().enumerate() {
            sessions.push(session(&format!("c{i}"), &[(Agent, 0.0, "q"), (Customer, g, "r")], None));
        }
        Corpus::from_sessions(sessions).unwrap()
    }

    #[test]
    fn thresholds_reproduce_reference_percentiles() {
        // Gap multisets whose nearest-rank quartiles equal the published 25th/50th/75th/100th values.
        let corpus = corpus_with_gaps(&[12.0, 26.0, 49.0, 439.0], &[13.0, 27.0, 51.0, 1326.0]);
        let t = compute_gap_thresholds(&corpus).unwrap();
        assert_eq!(t.customer_p25, 13.0);
        assert_eq!(t.agent_p75, 49.0);
        assert_eq!(t, thresholds());
    }

    #[test]
    fn thresholds_constant_and_uniform() {
        let t = compute_gap_thresholds(&corpus_with_gaps(&[10.0; 7], &[3.0])).unwrap();
        assert_eq!((t.agent_p25, t.agent_p75), (10.0, 10.0));

        let gaps: Vec<f64> = (1..=100).map(f64::from).collect();
        // brute force: the smallest value v with #{g <= v} >= p * n
        let brute = |p: f64| {
            *gaps
                .iter()
                .find(|&&v| gaps.iter().filter(|&&g| g <= v).count() as f64 >= p * gaps.len() as f64)
                .unwrap()
        };
        assert_eq!((brute(0.25), brute(0.75)), (25.0, 75.0));
        let t = compute_gap_thresholds(&corpus_with_gaps(&gaps, &[1.0])).unwrap();
        assert_eq!((t.agent_p25, t.agent_p75), (25.0, 75.0));
    }

    #[test]
    fn thresholds_need_both_responders() {
        let corpus = corpus_with_gaps(&[5.0], &[]);
        assert!(matches!(compute_gap_thresholds(&corpus), Err(Error::NoGaps(Customer))));
    }

    #[test]
    fn gap_token_boundaries() {
        let t = thresholds();
        assert_eq!(gap_token(49.0, Agent, &t).name(), "Long_Agent");
        assert_eq!(gap_token(13.0, Customer, &t).name(), "Medium_Customer");
        assert_eq!(gap_token(0.0, Customer, &t).name(), "Short_Customer");
        assert_eq!(gap_token(-4.0, Agent, &t).bucket, GapBucket::Short);
        assert_eq!(gap_token(48.999, Agent, &t).bucket, GapBucket::Medium);
    }

    #[test]
    fn gap_ids_are_fixed() {
        let ids: Vec<u32> = GapToken::ALL.iter().map(|g| g.id()).collect();
        assert_eq!(ids, vec![2, 3, 4, 5, 6, 7]);
        for g in GapToken::ALL {
            assert_eq!(GapToken::from_id(g.id()), Some(g));
        }
        assert_eq!(GapToken::from_id(8), None);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_text("My PHONE is Broken!!"), vec!["my", "phone", "is", "broken"]);
        assert!(normalize_text("").is_empty());
        assert_eq!(normalize_text("running runs"), vec!["run", "run"]);
        assert_eq!(normalize_text("I don't know, it's 'fine'"), vec!["i", "don't", "know", "it", "fine"]);
    }

    #[test]
    fn vocab_thresholding() {
        let text = "phone phone phone phone phone zzz";
        let s = session("v", &[(Customer, 0.0, text)], None);
        let corpus = Corpus::from_sessions(vec![s]).unwrap();
        let v = build_vocab(&corpus, 2);
        assert_eq!(v.id("phone"), FIRST_WORD_ID);
        assert_eq!(v.id("zzz"), UNK_ID);
        let v1 = build_vocab(&corpus, 1);
        assert_ne!(v1.id("zzz"), UNK_ID);
    }

    #[test]
    fn vocab_size_counts_reserved_and_words() {
        // 10 tokens: a x3, b x3, c x2, d, e
        let s = session("v", &[(Agent, 0.0, "a b c a b"), (Customer, 1.0, "a b c d e")], None);
        let corpus = Corpus::from_sessions(vec![s]).unwrap();
        let mut counts: HashMap<String, usize> = HashMap::new();
        for u in corpus.sessions()[0].utterances() {
            for w in u.text.split_whitespace() {
                *counts.entry(w.to_string()).or_default() += 1;
            }
        }
        for min in 1..=4 {
            let expected = 2 + 6 + counts.values().filter(|&&c| c >= min).count();
            assert_eq!(build_vocab(&corpus, min).len(), expected, "min_frequency {min}");
        }
    }

    #[test]
    fn vocab_text_round_trip() {
        let s = session("v", &[(Agent, 0.0, "hello there friend hello")], None);
        let v = build_vocab(&Corpus::from_sessions(vec![s]).unwrap(), 1);
        let text = v.to_text();
        assert!(text.contains("<PAD>\t0\n<UNK>\t1\nShort_Agent\t2\n"));
        let back = Vocab::read(text.as_bytes()).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.fingerprint(), v.fingerprint());
        assert!(Vocab::read("foo\t0\n".as_bytes()).is_err());
    }

    #[test]
    fn thresholds_text_round_trip() {
        let t = GapThresholds::new(12.5, 49.0, 13.0, 51.25).unwrap();
        assert_eq!(GapThresholds::parse(&t.to_text()).unwrap(), t);
        assert!(GapThresholds::parse("agent_p25 = 1\n").is_err());
        assert!(GapThresholds::new(5.0, 4.0, 1.0, 2.0).is_err());
    }

    fn two_turn_session() -> Session {
        session("e", &[(Agent, 0.0, "hello how are"), (Customer, 30.0, "broken screen")], Some(1))
    }

    fn vocab_for(s: &Session) -> Vocab {
        build_vocab(&Corpus::from_sessions(vec![s.clone()]).unwrap(), 1)
    }

    #[test]
    fn encode_with_and_without_time() {
        let s = two_turn_session();
        let v = vocab_for(&s);
        let seq = encode_session(&s, &v, &thresholds(), true, 10).unwrap();
        assert_eq!(seq.true_length, 6);
        assert_eq!(&seq.ids[..4], &[PAD_ID; 4]);
        assert_eq!(seq.ids[7], GapToken::new(GapBucket::Medium, Customer).id());
        assert_eq!(seq.label, Some(1));
        assert_eq!(v.decode(&seq), vec!["hello", "how", "ar", "Medium_Customer", "broken", "screen"]);

        let seq = encode_session(&s, &v, &thresholds(), false, 10).unwrap();
        assert_eq!(seq.true_length, 5);
        assert!(seq.ids.iter().all(|&id| GapToken::from_id(id).is_none()));
    }

    #[test]
    fn encode_keeps_tail() {
        let words: Vec<String> = (0..512).map(|i| format!("w{i}")).collect();
        let s = session("long", &[(Customer, 0.0, &words.join(" "))], None);
        let v = vocab_for(&s);
        let stream = encode_stream(&s, &v, &thresholds(), true);
        assert_eq!(stream.len(), 512);
        let seq = encode_session(&s, &v, &thresholds(), true, 500).unwrap();
        assert_eq!(seq.true_length, 500);
        assert_eq!(seq.ids, stream[12..].to_vec());
        assert_eq!(v.token(seq.ids[0]), Some("w12"));
    }

    #[test]
    fn empty_encoding_is_error() {
        let s = session("q", &[(Agent, 0.0, "!!!"), (Agent, 1.0, "")], None);
        let v = vocab_for(&two_turn_session());
        assert!(matches!(
            encode_session(&s, &v, &thresholds(), false, 10),
            Err(Error::EmptyEncoding(_))
        ));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(text in "[A-Za-z0-9' ,.!?]{0,60}") {
            let once = normalize_text(&text);
            prop_assert_eq!(normalize_text(&once.join(" ")), once);
        }

        #[test]
        fn gap_buckets_exclusive_and_exhaustive(gap in 0.0f64..2000.0, a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let t = GapThresholds::new(lo, hi, lo, hi).unwrap();
            let tok = gap_token(gap, Customer, &t);
            let matches = [gap < lo, lo <= gap && gap < hi, gap >= hi];
            prop_assert_eq!(matches.iter().filter(|&&m| m).count(), 1);
            let expected = match matches.iter().position(|&m| m).unwrap() {
                0 => GapBucket::Short,
                1 => GapBucket::Medium,
                _ => GapBucket::Long,
            };
            prop_assert_eq!(tok.bucket, expected);
        }

        #[test]
        fn nearest_rank_quartile_mass(mut gaps in proptest::collection::vec(0.0f64..500.0, 1..200)) {
            gaps.sort_by(f64::total_cmp);
            let n = gaps.len() as f64;
            let p25 = nearest_rank(&gaps, 0.25);
            let p75 = nearest_rank(&gaps, 0.75);
            prop_assert!(gaps.iter().filter(|&&g| g < p25).count() as f64 <= 0.25 * n);
            prop_assert!(gaps.iter().filter(|&&g| g >= p75).count() as f64 >= 0.25 * n);
        }
    }
}
