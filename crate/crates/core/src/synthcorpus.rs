//! Seeded synthetic chat corpora with a planted dissatisfaction signal.
//!
//! Sessions alternate agent and customer turns, starting with the agent.
//! Turn text is a run of consecutive words from a phrase pool, so bigrams
//! look like phrases. Response gaps are log-normal. A dissatisfied session
//! is lexically marked with probability `lexical_signal_strength` (a share
//! of its customer words become complaint words) and, independently,
//! temporally marked with probability `temporal_signal_strength` (customer
//! response gaps are stretched). Nothing else depends on the label, so with
//! both strengths at zero the text and timing carry no information.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, WeightedIndex};

use crate::chatlog::{Corpus, Disconnect, Provenance, Rating, Session, SessionMeta, Speaker, Utterance};
use crate::container::parse_key_values;
use crate::error::{Error, Result};

const AGENT_POOL: &str = include_str!("../data/pools/agent.txt");
const CUSTOMER_POOL: &str = include_str!("../data/pools/customer.txt");
const COMPLAINT_POOL: &str = include_str!("../data/pools/complaint.txt");

pub const AGENT_GAP_MEDIAN: f64 = 26.0;
pub const CUSTOMER_GAP_MEDIAN: f64 = 27.0;
pub const GAP_SIGMA: f64 = 0.94;
/// Customer gap median multiplier in temporally marked sessions.
pub const TEMPORAL_GAP_FACTOR: f64 = 10.0;
/// Share of customer words replaced in lexically marked sessions.
pub const COMPLAINT_WORD_RATE: f64 = 0.3;
/// Star weights for ratings 3, 4 and 5 of satisfied customers.
const POSITIVE_STAR_WEIGHTS: [f64; 3] = [0.146, 0.29, 0.565];
const VERY_DISSATISFIED_SHARE: f64 = 0.7;
/// Label placement; session `i` draws from stream `i + 1`.
const PLAN_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n_sessions: usize,
    pub labeled_fraction: f64,
    pub dissatisfied_rate_labeled: f64,
    pub dissatisfied_rate_unlabeled: f64,
    pub lexical_signal_strength: f64,
    pub temporal_signal_strength: f64,
    /// Inclusive bounds on turns per session.
    pub turns_range: (usize, usize),
    /// Inclusive bounds on words per turn.
    pub words_per_turn_range: (usize, usize),
    pub rng_seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            n_sessions: 1000,
            labeled_fraction: 0.162,
            dissatisfied_rate_labeled: 0.2,
            dissatisfied_rate_unlabeled: 0.2,
            lexical_signal_strength: 0.8,
            temporal_signal_strength: 0.5,
            turns_range: (6, 12),
            words_per_turn_range: (3, 8),
            rng_seed: 0,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("labeled_fraction", self.labeled_fraction),
            ("dissatisfied_rate_labeled", self.dissatisfied_rate_labeled),
            ("dissatisfied_rate_unlabeled", self.dissatisfied_rate_unlabeled),
            ("lexical_signal_strength", self.lexical_signal_strength),
            ("temporal_signal_strength", self.temporal_signal_strength),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        for (name, (lo, hi)) in [("turns_range", self.turns_range), ("words_per_turn_range", self.words_per_turn_range)] {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!("{name} = {lo}..={hi} must be positive and ordered")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!(
            "n_sessions = {}\nlabeled_fraction = {}\ndissatisfied_rate_labeled = {}\ndissatisfied_rate_unlabeled = {}\n\
             lexical_signal_strength = {}\ntemporal_signal_strength = {}\nturns_range = {}..={}\n\
             words_per_turn_range = {}..={}\nrng_seed = {}\n",
            self.n_sessions,
            self.labeled_fraction,
            self.dissatisfied_rate_labeled,
            self.dissatisfied_rate_unlabeled,
            self.lexical_signal_strength,
            self.temporal_signal_strength,
            self.turns_range.0,
            self.turns_range.1,
            self.words_per_turn_range.0,
            self.words_per_turn_range.1,
            self.rng_seed
        )
    }

    pub fn parse(text: &str) -> Result<GenSpec> {
        let mut spec = GenSpec::default();
        for (k, v) in parse_key_values(text)? {
            spec.set(&k, &v)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Sets one field from its text form; unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Config(format!("bad value for {key}: {value:?}"));
        let f = |v: &str| v.parse::<f64>().map_err(|_| bad());
        match key {
            "n_sessions" => self.n_sessions = value.parse().map_err(|_| bad())?,
            "labeled_fraction" => self.labeled_fraction = f(value)?,
            "dissatisfied_rate_labeled" => self.dissatisfied_rate_labeled = f(value)?,
            "dissatisfied_rate_unlabeled" => self.dissatisfied_rate_unlabeled = f(value)?,
            "lexical_signal_strength" => self.lexical_signal_strength = f(value)?,
            "temporal_signal_strength" => self.temporal_signal_strength = f(value)?,
            "turns_range" => self.turns_range = parse_range(value).ok_or_else(bad)?,
            "words_per_turn_range" => self.words_per_turn_range = parse_range(value).ok_or_else(bad)?,
            "rng_seed" => self.rng_seed = value.parse().map_err(|_| bad())?,
            _ => return Err(Error::Config(format!("unknown generator key {key:?}"))),
        }
        Ok(())
    }
}

/// `a..=b` or `a-b`.
pub fn parse_range(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once("..=").or_else(|| s.split_once('-'))?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// True label of every generated session, labeled or not.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth(pub BTreeMap<String, u8>);

impl GroundTruth {
    pub fn get(&self, session_id: &str) -> Option<u8> {
        self.0.get(session_id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.0)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn read<R: std::io::Read>(input: R) -> Result<GroundTruth> {
        Ok(GroundTruth(serde_json::from_reader(input)?))
    }
}

struct Pools {
    agent: Vec<Vec<&'static str>>,
    customer: Vec<Vec<&'static str>>,
    complaint: Vec<&'static str>,
    complaint_weights: WeightedIndex<f64>,
}

fn phrase_lines(text: &'static str) -> Vec<Vec<&'static str>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect())
        .collect()
}

impl Pools {
    fn load() -> Pools {
        let complaint: Vec<&str> = phrase_lines(COMPLAINT_POOL).into_iter().flatten().collect();
        // Zipf weights: the k-th complaint word is drawn with weight 1/k.
        let weights: Vec<f64> = (1..=complaint.len()).map(|k| 1.0 / k as f64).collect();
        Pools {
            agent: phrase_lines(AGENT_POOL),
            customer: phrase_lines(CUSTOMER_POOL),
            complaint,
            complaint_weights: WeightedIndex::new(weights).expect("non-empty complaint pool"),
        }
    }

    /// `n` consecutive words starting at a random position, running on
    /// into the following phrase lines when one ends.
    fn words(lines: &[Vec<&'static str>], n: usize, rng: &mut ChaCha8Rng) -> Vec<&'static str> {
        let mut li = rng.gen_range(0..lines.len());
        let mut wi = rng.gen_range(0..lines[li].len());
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            out.push(lines[li][wi]);
            wi += 1;
            if wi == lines[li].len() {
                li = (li + 1) % lines.len();
                wi = 0;
            }
        }
        out
    }
}

fn round_ms(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

struct Plan {
    labeled: bool,
    dissatisfied: bool,
}

/// Exact labeled count and exact dissatisfied counts within each group,
/// placed at seeded random positions.
fn plan(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<Plan> {
    let n = spec.n_sessions;
    let n_labeled = (n as f64 * spec.labeled_fraction).round() as usize;
    let n_unlabeled = n - n_labeled;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut plans: Vec<Plan> = (0..n)
        .map(|_| Plan {
            labeled: false,
            dissatisfied: false,
        })
        .collect();
    let (lab, unlab) = order.split_at(n_labeled);
    let k_lab = (n_labeled as f64 * spec.dissatisfied_rate_labeled).round() as usize;
    let k_unlab = (n_unlabeled as f64 * spec.dissatisfied_rate_unlabeled).round() as usize;
    for (j, &i) in lab.iter().enumerate() {
        plans[i].labeled = true;
        plans[i].dissatisfied = j < k_lab;
    }
    for (j, &i) in unlab.iter().enumerate() {
        plans[i].dissatisfied = j < k_unlab;
    }
    plans
}

fn rating_for(dissatisfied: bool, rng: &mut ChaCha8Rng) -> Rating {
    if dissatisfied {
        if rng.gen::<f64>() < VERY_DISSATISFIED_SHARE {
            Rating::VeryDissatisfied
        } else {
            Rating::Dissatisfied
        }
    } else {
        let idx = WeightedIndex::new(POSITIVE_STAR_WEIGHTS).expect("valid weights").sample(rng);
        [Rating::Average, Rating::Satisfied, Rating::VerySatisfied][idx]
    }
}

fn base_time() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2017, 1, 2).expect("valid date").and_hms_opt(8, 0, 0).expect("valid time")
}

fn session(index: usize, p: &Plan, spec: &GenSpec, pools: &Pools) -> Session {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng.set_stream(index as u64 + 1);
    let lexical = p.dissatisfied && rng.gen::<f64>() < spec.lexical_signal_strength;
    let temporal = p.dissatisfied && rng.gen::<f64>() < spec.temporal_signal_strength;
    let customer_median = CUSTOMER_GAP_MEDIAN * if temporal { TEMPORAL_GAP_FACTOR } else { 1.0 };
    let agent_gap = LogNormal::new(AGENT_GAP_MEDIAN.ln(), GAP_SIGMA).expect("valid log-normal");
    let customer_gap = LogNormal::new(customer_median.ln(), GAP_SIGMA).expect("valid log-normal");

    let n_turns = rng.gen_range(spec.turns_range.0..=spec.turns_range.1);
    let mut utterances = Vec::new();
    let mut t = 0.0f64;
    for turn in 0..n_turns {
        let speaker = if turn % 2 == 0 { Speaker::Agent } else { Speaker::Customer };
        if turn > 0 {
            let gap = match speaker {
                Speaker::Agent => agent_gap.sample(&mut rng),
                Speaker::Customer => customer_gap.sample(&mut rng),
            };
            t = round_ms(t + gap.max(0.5));
        }
        let n_words = rng.gen_range(spec.words_per_turn_range.0..=spec.words_per_turn_range.1);
        let lines = if speaker == Speaker::Agent { &pools.agent } else { &pools.customer };
        let mut words = Pools::words(lines, n_words, &mut rng);
        if lexical && speaker == Speaker::Customer {
            for w in words.iter_mut() {
                if rng.gen::<f64>() < COMPLAINT_WORD_RATE {
                    *w = pools.complaint[pools.complaint_weights.sample(&mut rng)];
                }
            }
        }
        let n_utts = rng.gen_range(1..=3usize).min(n_words);
        let mut cuts: Vec<usize> = (1..n_words).collect();
        cuts.shuffle(&mut rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(n_utts - 1).collect();
        cuts.sort_unstable();
        let mut start = 0;
        for (u, end) in cuts.into_iter().chain([n_words]).enumerate() {
            if u > 0 {
                t = round_ms(t + rng.gen_range(1.0..8.0));
            }
            utterances.push(Utterance::new(speaker, t, words[start..end].join(" ")));
            start = end;
        }
    }
    let start_time = base_time() + Duration::seconds(index as i64 * 97);
    let tail_ms = rng.gen_range(2_000..30_000i64);
    let end_time = start_time + Duration::milliseconds((t * 1000.0).round() as i64 + tail_ms);
    let disconnecting_entity = match rng.gen_range(0..10) {
        0..=5 => Disconnect::Customer,
        6..=8 => Disconnect::Agent,
        _ => Disconnect::Unknown,
    };
    let region = ["us-east", "us-west", "eu", "apac"][rng.gen_range(0..4)];
    let meta = SessionMeta {
        session_id: format!("s{index:06}"),
        agent_id: format!("agent{:03}", rng.gen_range(0..40)),
        start_time,
        end_time,
        disconnecting_entity,
        region: Some(region.to_string()),
    };
    let rating = p.labeled.then(|| rating_for(p.dissatisfied, &mut rng));
    Session::new(meta, utterances, rating).expect("generated sessions are well-formed")
}

pub fn generate(spec: &GenSpec) -> Result<(Corpus, GroundTruth)> {
    spec.validate()?;
    let pools = Pools::load();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    rng.set_stream(PLAN_STREAM);
    let plans = plan(spec, &mut rng);
    let mut truth = BTreeMap::new();
    let mut sessions = Vec::with_capacity(plans.len());
    for (i, p) in plans.iter().enumerate() {
        let s = session(i, p, spec, &pools);
        truth.insert(s.id().to_string(), u8::from(p.dissatisfied));
        sessions.push(s);
    }
    let corpus = Corpus::new(sessions, Provenance::new(format!("synthetic seed={}", spec.rng_seed)))?;
    Ok((corpus, GroundTruth(truth)))
}
