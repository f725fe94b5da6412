//! Chat-session data model, the JSONL/XML log formats, and corpus summaries.
//!
//! Utterance times are stored as second offsets from the session start.
//! Absolute timestamps are expected to be already localized; no timezone
//! resolution happens here.
//!
//! # XML layout
//!
//! ```xml
//! <sessions>
//!   <session>
//!     <session_id>s1</session_id>
//!     <agent_id>a7</agent_id>
//!     <start_time>2017-03-01T10:00:00</start_time>
//!     <end_time>2017-03-01T10:14:30</end_time>
//!     <disconnecting_entity>customer</disconnecting_entity>
//!     <region>us-east</region>          <!-- optional -->
//!     <rating>4</rating>                <!-- optional, 1..=5 -->
//!     <utterances>
//!       <utterance speaker="agent" t="0">Hello, how can I help?</utterance>
//!     </utterances>
//!   </session>
//! </sessions>
//! ```
//!
//! The root element name is not checked; every `<session>` child is a record.
//! `t` may be a second offset or an absolute timestamp, as in JSONL.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::time::SystemTime;

use chrono::{DateTime, NaiveDateTime};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Agent,
    Customer,
}

impl Speaker {
    pub fn as_str(self) -> &'static str {
        match self {
            Speaker::Agent => "agent",
            Speaker::Customer => "customer",
        }
    }

    pub fn other(self) -> Speaker {
        match self {
            Speaker::Agent => Speaker::Customer,
            Speaker::Customer => Speaker::Agent,
        }
    }

    fn parse(s: &str) -> Option<Speaker> {
        match s {
            "agent" => Some(Speaker::Agent),
            "customer" => Some(Speaker::Customer),
            _ => None,
        }
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Speaker::Agent => "Agent",
            Speaker::Customer => "Customer",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub speaker: Speaker,
    /// Seconds since session start.
    pub t: f64,
    pub text: String,
}

impl Utterance {
    pub fn new(speaker: Speaker, t: f64, text: impl Into<String>) -> Self {
        Utterance {
            speaker,
            t,
            text: text.into(),
        }
    }

    /// Empty-text utterances count toward length filters but yield no words.
    pub fn is_degenerate(&self) -> bool {
        self.text.trim().is_empty()
    }
}

/// Post-chat survey answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rating {
    VeryDissatisfied = 1,
    Dissatisfied = 2,
    Average = 3,
    Satisfied = 4,
    VerySatisfied = 5,
}

impl Rating {
    pub const ALL: [Rating; 5] = [
        Rating::VeryDissatisfied,
        Rating::Dissatisfied,
        Rating::Average,
        Rating::Satisfied,
        Rating::VerySatisfied,
    ];

    pub fn from_stars(stars: i64) -> Option<Rating> {
        match stars {
            1 => Some(Rating::VeryDissatisfied),
            2 => Some(Rating::Dissatisfied),
            3 => Some(Rating::Average),
            4 => Some(Rating::Satisfied),
            5 => Some(Rating::VerySatisfied),
            _ => None,
        }
    }

    pub fn stars(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Rating::VeryDissatisfied => "VeryDissatisfied",
            Rating::Dissatisfied => "Dissatisfied",
            Rating::Average => "Average",
            Rating::Satisfied => "Satisfied",
            Rating::VerySatisfied => "VerySatisfied",
        }
    }
}

/// Binary target: 1 for a dissatisfied customer (one or two stars), 0 otherwise.
pub fn dichotomize(rating: Rating) -> u8 {
    match rating {
        Rating::VeryDissatisfied | Rating::Dissatisfied => 1,
        Rating::Average | Rating::Satisfied | Rating::VerySatisfied => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disconnect {
    Agent,
    Customer,
    Unknown,
}

impl Disconnect {
    pub fn as_str(self) -> &'static str {
        match self {
            Disconnect::Agent => "agent",
            Disconnect::Customer => "customer",
            Disconnect::Unknown => "unknown",
        }
    }

    fn parse(s: &str) -> Option<Disconnect> {
        match s {
            "agent" => Some(Disconnect::Agent),
            "customer" => Some(Disconnect::Customer),
            "unknown" => Some(Disconnect::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionMeta {
    pub session_id: String,
    pub agent_id: String,
    pub start_time: NaiveDateTime,
    pub end_time: NaiveDateTime,
    pub disconnecting_entity: Disconnect,
    pub region: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub meta: SessionMeta,
    utterances: Vec<Utterance>,
    pub rating: Option<Rating>,
}

impl Session {
    /// Builds a session, sorting utterances by time (stable).
    pub fn new(meta: SessionMeta, mut utterances: Vec<Utterance>, rating: Option<Rating>) -> Result<Self> {
        if meta.end_time < meta.start_time {
            return Err(Error::InvalidInput(format!(
                "session {:?}: end_time precedes start_time",
                meta.session_id
            )));
        }
        if let Some(u) = utterances.iter().find(|u| !(u.t >= 0.0 && u.t.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "session {:?}: utterance offset {} is not a finite non-negative number",
                meta.session_id, u.t
            )));
        }
        utterances.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(Session {
            meta,
            utterances,
            rating,
        })
    }

    pub fn id(&self) -> &str {
        &self.meta.session_id
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn is_labeled(&self) -> bool {
        self.rating.is_some()
    }

    /// Binary dissatisfaction label, if rated.
    pub fn label(&self) -> Option<u8> {
        self.rating.map(dichotomize)
    }

    /// Wall-clock length in seconds: the larger of `end_time - start_time`
    /// and the last utterance offset.
    pub fn duration_secs(&self) -> f64 {
        let span = (self.meta.end_time - self.meta.start_time)
            .num_microseconds()
            .map(|us| us as f64 / 1e6)
            .unwrap_or(f64::MAX);
        let last = self.utterances.last().map_or(0.0, |u| u.t);
        span.max(last)
    }

    pub fn word_count(&self) -> usize {
        self.utterances
            .iter()
            .map(|u| u.text.split_whitespace().count())
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub sources: Vec<String>,
    pub loaded_at: SystemTime,
}

impl Provenance {
    pub fn new(source: impl Into<String>) -> Self {
        Provenance {
            sources: vec![source.into()],
            loaded_at: SystemTime::now(),
        }
    }
}

/// A set of sessions with unique ids.
#[derive(Debug, Clone)]
pub struct Corpus {
    sessions: Vec<Session>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(sessions: Vec<Session>, provenance: Provenance) -> Result<Self> {
        let mut seen = HashSet::with_capacity(sessions.len());
        for s in &sessions {
            if !seen.insert(s.id()) {
                return Err(Error::DuplicateSession(s.id().to_string()));
            }
        }
        Ok(Corpus {
            sessions,
            provenance,
        })
    }

    pub fn from_sessions(sessions: Vec<Session>) -> Result<Self> {
        Corpus::new(sessions, Provenance::new("<memory>"))
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn into_sessions(self) -> Vec<Session> {
        self.sessions
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    pub fn labeled(&self) -> impl Iterator<Item = &Session> {
        self.sessions.iter().filter(|s| s.is_labeled())
    }

    pub fn unlabeled(&self) -> impl Iterator<Item = &Session> {
        self.sessions.iter().filter(|s| !s.is_labeled())
    }

    /// Sub-corpus with the same provenance.
    pub fn retain(&self, mut keep: impl FnMut(&Session) -> bool) -> Corpus {
        Corpus {
            sessions: self.sessions.iter().filter(|s| keep(s)).cloned().collect(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Xml,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(Format::Jsonl),
            "xml" => Ok(Format::Xml),
            other => Err(Error::Config(format!("unknown corpus format {other:?} (jsonl|xml)"))),
        }
    }
}

/// Parses a whole input stream into a corpus.
pub fn parse_sessions<R: Read>(input: R, format: Format, source: &str) -> Result<Corpus> {
    let sessions = match format {
        Format::Jsonl => parse_jsonl(input)?,
        Format::Xml => parse_xml(input)?,
    };
    Corpus::new(sessions, Provenance::new(source))
}

pub fn read_corpus(path: &std::path::Path) -> Result<Corpus> {
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("xml") => Format::Xml,
        _ => Format::Jsonl,
    };
    let file = std::fs::File::open(path)?;
    parse_sessions(file, format, &path.display().to_string())
}

pub fn write_sessions<W: Write>(corpus: &Corpus, format: Format, out: W) -> Result<()> {
    match format {
        Format::Jsonl => write_jsonl(corpus, out),
        Format::Xml => write_xml(corpus, out),
    }
}

pub fn format_timestamp(ts: &NaiveDateTime) -> String {
    ts.format("%Y-%m-%dT%H:%M:%S%.f").to_string()
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_local());
    }
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
}

/// Accumulates one record's fields from either input format.
struct RecordBuilder {
    index: usize,
}

impl RecordBuilder {
    fn timestamp(&self, field: &str, raw: Option<&str>) -> Result<NaiveDateTime> {
        let raw = raw.ok_or_else(|| Error::record(self.index, field, "missing"))?;
        parse_timestamp(raw).ok_or_else(|| Error::record(self.index, field, format!("bad timestamp {raw:?}")))
    }

    fn rating(&self, stars: Option<i64>) -> Result<Option<Rating>> {
        stars
            .map(|v| {
                Rating::from_stars(v)
                    .ok_or_else(|| Error::record(self.index, "rating", format!("value {v} out of range 1..=5")))
            })
            .transpose()
    }

    /// Offset from a numeric or absolute-timestamp utterance time.
    fn offset(&self, field: &str, raw: OffsetRaw<'_>, start: &NaiveDateTime) -> Result<f64> {
        let t = match raw {
            OffsetRaw::Seconds(t) => t,
            OffsetRaw::Text(s) => match s.parse::<f64>() {
                Ok(t) => t,
                Err(_) => {
                    let abs = parse_timestamp(s)
                        .ok_or_else(|| Error::record(self.index, field, format!("bad time {s:?}")))?;
                    (abs - *start)
                        .num_microseconds()
                        .map(|us| us as f64 / 1e6)
                        .ok_or_else(|| Error::record(self.index, field, "time out of range"))?
                }
            },
        };
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::record(self.index, field, format!("offset {t} must be finite and >= 0")));
        }
        Ok(t)
    }

    fn finish(&self, meta: SessionMeta, utterances: Vec<Utterance>, rating: Option<Rating>) -> Result<Session> {
        Session::new(meta, utterances, rating).map_err(|e| match e {
            Error::InvalidInput(m) => Error::record(self.index, "session", m),
            other => other,
        })
    }
}

enum OffsetRaw<'a> {
    Seconds(f64),
    Text(&'a str),
}

fn parse_jsonl<R: Read>(input: R) -> Result<Vec<Session>> {
    let mut sessions = Vec::new();
    let mut index = 0;
    for line in BufReader::new(input).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::record(index, "<json>", e))?;
        sessions.push(jsonl_record(index, &value)?);
        index += 1;
    }
    Ok(sessions)
}

fn jsonl_record(index: usize, v: &Value) -> Result<Session> {
    let b = RecordBuilder { index };
    let obj = v
        .as_object()
        .ok_or_else(|| Error::record(index, "<record>", "expected a JSON object"))?;
    let string = |field: &str| -> Result<String> {
        obj.get(field)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::record(index, field, "missing or not a string"))
    };
    let opt_string = |field: &str| -> Result<Option<String>> {
        match obj.get(field) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(Error::record(index, field, "expected string or null")),
        }
    };

    let start_time = b.timestamp("start_time", obj.get("start_time").and_then(Value::as_str))?;
    let end_time = b.timestamp("end_time", obj.get("end_time").and_then(Value::as_str))?;
    let disconnect_raw = string("disconnecting_entity")?;
    let disconnecting_entity = Disconnect::parse(&disconnect_raw)
        .ok_or_else(|| Error::record(index, "disconnecting_entity", format!("unknown value {disconnect_raw:?}")))?;
    let rating = match obj.get("rating") {
        None | Some(Value::Null) => None,
        Some(Value::Number(n)) => Some(
            n.as_i64()
                .ok_or_else(|| Error::record(index, "rating", format!("non-integer value {n}")))?,
        ),
        Some(_) => return Err(Error::record(index, "rating", "expected integer or null")),
    };
    let rating = b.rating(rating)?;

    let raw_utts = obj
        .get("utterances")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::record(index, "utterances", "missing or not an array"))?;
    let mut utterances = Vec::with_capacity(raw_utts.len());
    for (k, u) in raw_utts.iter().enumerate() {
        let field = |name: &str| format!("utterances[{k}].{name}");
        let speaker = u
            .get("speaker")
            .and_then(Value::as_str)
            .and_then(Speaker::parse)
            .ok_or_else(|| Error::record(index, &field("speaker"), "expected \"agent\" or \"customer\""))?;
        let t_raw = match u.get("t") {
            Some(Value::Number(n)) => OffsetRaw::Seconds(n.as_f64().unwrap_or(f64::NAN)),
            Some(Value::String(s)) => OffsetRaw::Text(s),
            _ => return Err(Error::record(index, &field("t"), "missing or not a number/timestamp")),
        };
        let t = b.offset(&field("t"), t_raw, &start_time)?;
        let text = u
            .get("text")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::record(index, &field("text"), "missing or not a string"))?;
        utterances.push(Utterance::new(speaker, t, text));
    }

    let meta = SessionMeta {
        session_id: string("session_id")?,
        agent_id: string("agent_id")?,
        start_time,
        end_time,
        disconnecting_entity,
        region: opt_string("region")?,
    };
    b.finish(meta, utterances, rating)
}

#[derive(Serialize)]
struct JsonUtterance<'a> {
    speaker: Speaker,
    t: f64,
    text: &'a str,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    session_id: &'a str,
    agent_id: &'a str,
    start_time: String,
    end_time: String,
    disconnecting_entity: &'static str,
    region: Option<&'a str>,
    rating: Option<u8>,
    utterances: Vec<JsonUtterance<'a>>,
}

fn write_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for s in corpus.sessions() {
        let rec = JsonRecord {
            session_id: &s.meta.session_id,
            agent_id: &s.meta.agent_id,
            start_time: format_timestamp(&s.meta.start_time),
            end_time: format_timestamp(&s.meta.end_time),
            disconnecting_entity: s.meta.disconnecting_entity.as_str(),
            region: s.meta.region.as_deref(),
            rating: s.rating.map(Rating::stars),
            utterances: s
                .utterances()
                .iter()
                .map(|u| JsonUtterance {
                    speaker: u.speaker,
                    t: u.t,
                    text: &u.text,
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn parse_xml<R: Read>(mut input: R) -> Result<Vec<Session>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let doc = roxmltree::Document::parse(&text).map_err(|e| Error::Format(format!("xml: {e}")))?;
    doc.root_element()
        .children()
        .filter(|n| n.has_tag_name("session"))
        .enumerate()
        .map(|(index, node)| xml_record(index, node))
        .collect()
}

fn xml_record(index: usize, node: roxmltree::Node<'_, '_>) -> Result<Session> {
    let b = RecordBuilder { index };
    let child = |name: &str| node.children().find(|c| c.has_tag_name(name));
    let child_text = |name: &str| child(name).map(|c| c.text().unwrap_or(""));
    let required = |name: &str| -> Result<String> {
        child_text(name)
            .map(str::to_string)
            .ok_or_else(|| Error::record(index, name, "missing element"))
    };

    let start_time = b.timestamp("start_time", child_text("start_time").map(str::trim))?;
    let end_time = b.timestamp("end_time", child_text("end_time").map(str::trim))?;
    let disconnect_raw = required("disconnecting_entity")?;
    let disconnecting_entity = Disconnect::parse(disconnect_raw.trim())
        .ok_or_else(|| Error::record(index, "disconnecting_entity", format!("unknown value {disconnect_raw:?}")))?;
    let rating = match child_text("rating").map(str::trim) {
        None | Some("") => None,
        Some(raw) => Some(
            raw.parse::<i64>()
                .map_err(|_| Error::record(index, "rating", format!("non-integer value {raw:?}")))?,
        ),
    };
    let rating = b.rating(rating)?;

    let mut utterances = Vec::new();
    if let Some(list) = child("utterances") {
        for (k, u) in list.children().filter(|c| c.has_tag_name("utterance")).enumerate() {
            let field = |name: &str| format!("utterances[{k}].{name}");
            let speaker = u
                .attribute("speaker")
                .and_then(Speaker::parse)
                .ok_or_else(|| Error::record(index, &field("speaker"), "expected \"agent\" or \"customer\""))?;
            let t_raw = u
                .attribute("t")
                .ok_or_else(|| Error::record(index, &field("t"), "missing attribute"))?;
            let t = b.offset(&field("t"), OffsetRaw::Text(t_raw), &start_time)?;
            utterances.push(Utterance::new(speaker, t, u.text().unwrap_or("")));
        }
    } else {
        return Err(Error::record(index, "utterances", "missing element"));
    }

    let meta = SessionMeta {
        session_id: required("session_id")?,
        agent_id: required("agent_id")?,
        start_time,
        end_time,
        disconnecting_entity,
        region: child_text("region").map(str::to_string),
    };
    b.finish(meta, utterances, rating)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            c => out.push(c),
        }
    }
    out
}

fn write_xml<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>")?;
    writeln!(out, "<sessions>")?;
    for s in corpus.sessions() {
        let m = &s.meta;
        writeln!(out, "  <session>")?;
        writeln!(out, "    <session_id>{}</session_id>", xml_escape(&m.session_id))?;
        writeln!(out, "    <agent_id>{}</agent_id>", xml_escape(&m.agent_id))?;
        writeln!(out, "    <start_time>{}</start_time>", format_timestamp(&m.start_time))?;
        writeln!(out, "    <end_time>{}</end_time>", format_timestamp(&m.end_time))?;
        writeln!(
            out,
            "    <disconnecting_entity>{}</disconnecting_entity>",
            m.disconnecting_entity.as_str()
        )?;
        if let Some(region) = &m.region {
            writeln!(out, "    <region>{}</region>", xml_escape(region))?;
        }
        if let Some(r) = s.rating {
            writeln!(out, "    <rating>{}</rating>", r.stars())?;
        }
        writeln!(out, "    <utterances>")?;
        for u in s.utterances() {
            writeln!(
                out,
                "      <utterance speaker=\"{}\" t=\"{}\">{}</utterance>",
                u.speaker.as_str(),
                u.t,
                xml_escape(&u.text)
            )?;
        }
        writeln!(out, "    </utterances>")?;
        writeln!(out, "  </session>")?;
    }
    writeln!(out, "</sessions>")?;
    Ok(())
}

/// Keeps sessions with at least `min_count` raw utterances.
pub fn filter_min_utterances(corpus: &Corpus, min_count: usize) -> Corpus {
    corpus.retain(|s| s.utterances().len() >= min_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    /// Lower-middle element for even counts.
    pub median: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        Some(Summary {
            mean: sorted.iter().sum::<f64>() / n as f64,
            min: sorted[0],
            median: sorted[(n - 1) / 2],
            max: sorted[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sessions: usize,
    pub labeled: usize,
    pub labeled_fraction: f64,
    pub duration_minutes: Option<Summary>,
    pub utterances: Option<Summary>,
    pub words: Option<Summary>,
    /// Counts for 1..=5 stars.
    pub rating_histogram: [usize; 5],
    pub mean_rating: Option<f64>,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let sessions = corpus.sessions();
    let durations: Vec<f64> = sessions.iter().map(|s| s.duration_secs() / 60.0).collect();
    let utterances: Vec<f64> = sessions.iter().map(|s| s.utterances().len() as f64).collect();
    let words: Vec<f64> = sessions.iter().map(|s| s.word_count() as f64).collect();
    let mut hist = [0usize; 5];
    for r in sessions.iter().filter_map(|s| s.rating) {
        hist[r.stars() as usize - 1] += 1;
    }
    let labeled: usize = hist.iter().sum();
    let mean_rating = (labeled > 0).then(|| {
        hist.iter()
            .enumerate()
            .map(|(i, &c)| (i + 1) as f64 * c as f64)
            .sum::<f64>()
            / labeled as f64
    });
    CorpusStats {
        sessions: sessions.len(),
        labeled,
        labeled_fraction: if sessions.is_empty() {
            0.0
        } else {
            labeled as f64 / sessions.len() as f64
        },
        duration_minutes: Summary::of(&durations),
        utterances: Summary::of(&utterances),
        words: Summary::of(&words),
        rating_histogram: hist,
        mean_rating,
    }
}
