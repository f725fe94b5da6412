//! The eight-method comparison: one split, shared preprocessing artifacts
//! fitted on the training part, balanced training sets, test-set metrics.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::classify::{NeuralClassifier, NgramClassifier, SessionClassifier, ValenceClassifier};
use super::metrics::{compute_metrics, threshold_calls, Metrics};
use super::split::{make_split, oversample_balance, Split};
use crate::baselines::{ForestConfig, L1Config};
use crate::chatlog::{Corpus, Session};
use crate::container::Container;
use crate::error::{Error, Result};
use crate::ngram::DEFAULT_TOP_K;
use crate::nnet::{CellType, ModelCheckpoint, ModelConfig};
use crate::preprocess::{Artifacts, DEFAULT_MIN_FREQUENCY};
use crate::valence::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Valence,
    Ngram,
    Neural { cell: CellType, include_time: bool },
}

impl Method {
    /// Row order of the comparison table.
    pub const ALL: [Method; 8] = [
        Method::Valence,
        Method::Ngram,
        Method::Neural {
            cell: CellType::TanhRnn,
            include_time: false,
        },
        Method::Neural {
            cell: CellType::Lstm,
            include_time: false,
        },
        Method::Neural {
            cell: CellType::Gru,
            include_time: false,
        },
        Method::Neural {
            cell: CellType::TanhRnn,
            include_time: true,
        },
        Method::Neural {
            cell: CellType::Lstm,
            include_time: true,
        },
        Method::Neural {
            cell: CellType::Gru,
            include_time: true,
        },
    ];

    pub fn name(self) -> String {
        match self {
            Method::Valence => "Valence".into(),
            Method::Ngram => "Ngram".into(),
            Method::Neural { cell, include_time } => cell.method_name(include_time),
        }
    }

    /// File-name form: `valence`, `ngram`, `lstm`, `gru_time`, ...
    pub fn slug(self) -> String {
        self.name().to_lowercase().replace('-', "_")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        let key = s.trim().to_lowercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.slug() == key)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// Parses a comma-separated method list; `all` selects the eight methods.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    if s.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    let mut out: Vec<Method> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Method = part.parse()?;
        if out.contains(&m) {
            return Err(Error::Config(format!("method {m} listed twice")));
        }
        out.push(m);
    }
    if out.is_empty() {
        return Err(Error::Config("empty method list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Seeds the split, oversampling and every model.
    pub seed: u64,
    pub threshold: f64,
    pub min_frequency: usize,
    /// Shared neural hyperparameters; cell, include_time, vocab_size and
    /// rng_seed are set per method.
    pub model: ModelConfig,
    pub forest: ForestConfig,
    pub l1: L1Config,
    pub ngram_top_k: usize,
    pub methods: Vec<Method>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            threshold: 0.5,
            min_frequency: DEFAULT_MIN_FREQUENCY,
            model: ModelConfig::new(CellType::Lstm, false, 1),
            forest: ForestConfig::default(),
            l1: L1Config::default(),
            ngram_top_k: DEFAULT_TOP_K,
            methods: Method::ALL.to_vec(),
        }
    }
}

/// A trained model of any of the eight methods.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Valence(ValenceClassifier),
    Ngram(NgramClassifier),
    Neural(NeuralClassifier),
}

impl TrainedModel {
    pub fn method(&self) -> Method {
        match self {
            TrainedModel::Valence(_) => Method::Valence,
            TrainedModel::Ngram(_) => Method::Ngram,
            TrainedModel::Neural(n) => Method::Neural {
                cell: n.checkpoint.config.cell,
                include_time: n.checkpoint.config.include_time,
            },
        }
    }

    pub fn to_container(&self) -> Container {
        match self {
            TrainedModel::Valence(m) => m.to_container(),
            TrainedModel::Ngram(m) => m.to_container(),
            TrainedModel::Neural(m) => m.checkpoint.to_container(),
        }
    }

    /// Dispatches on the container kind. Valence models are checked against
    /// the built-in lexicon.
    pub fn from_container(c: &Container) -> Result<TrainedModel> {
        match c.kind.as_str() {
            crate::baselines::forest::KIND => Ok(TrainedModel::Valence(ValenceClassifier::from_container(
                c,
                Lexicon::builtin(),
            )?)),
            crate::baselines::logreg::KIND => Ok(TrainedModel::Ngram(NgramClassifier::from_container(c)?)),
            crate::nnet::checkpoint::KIND => Ok(TrainedModel::Neural(NeuralClassifier::from_checkpoint(
                ModelCheckpoint::from_container(c)?,
            )?)),
            other => Err(Error::Format(format!("unknown model kind {other:?}"))),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_container().save(path)
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        TrainedModel::from_container(&Container::load(path)?)
    }

    pub fn as_classifier(&self) -> &dyn SessionClassifier {
        match self {
            TrainedModel::Valence(m) => m,
            TrainedModel::Ngram(m) => m,
            TrainedModel::Neural(m) => m,
        }
    }
}

impl SessionClassifier for TrainedModel {
    fn name(&self) -> String {
        self.as_classifier().name()
    }

    fn predict_proba(&self, sessions: &[&Session]) -> Result<Vec<f64>> {
        self.as_classifier().predict_proba(sessions)
    }
}

pub struct TrainedSet {
    pub split: Split,
    pub artifacts: Artifacts,
    pub models: Vec<TrainedModel>,
}

fn by_id<'a>(corpus: &'a Corpus) -> HashMap<&'a str, &'a Session> {
    corpus.sessions().iter().map(|s| (s.id(), s)).collect()
}

fn lookup<'a>(index: &HashMap<&str, &'a Session>, ids: &[String]) -> Result<Vec<(&'a Session, u8)>> {
    ids.iter()
        .map(|id| {
            let s = index
                .get(id.as_str())
                .ok_or_else(|| Error::InvalidInput(format!("session {id:?} not in corpus")))?;
            let y = s.label().ok_or_else(|| Error::InvalidInput(format!("session {id:?} is unlabeled")))?;
            Ok((*s, y))
        })
        .collect()
}

/// Trains every configured method on the labeled part of `corpus`.
pub fn train_methods(corpus: &Corpus, cfg: &ExperimentConfig) -> Result<TrainedSet> {
    let ids: Vec<String> = corpus.labeled().map(|s| s.id().to_string()).collect();
    let split = make_split(&ids, cfg.seed)?;
    let index = by_id(corpus);
    let train_items = lookup(&index, &split.train)?;
    let val_items = lookup(&index, &split.val)?;
    let train_corpus = Corpus::from_sessions(train_items.iter().map(|(s, _)| (*s).clone()).collect())?;
    let artifacts = Artifacts::fit(&train_corpus, cfg.min_frequency)?;
    let balanced = oversample_balance(&train_items, cfg.seed)?;
    let (bal_sessions, bal_labels): (Vec<&Session>, Vec<u8>) = balanced.iter().copied().unzip();
    log::info!(
        "split: {} train ({} after balancing), {} val, {} test; vocab {} ids",
        split.train.len(),
        balanced.len(),
        split.val.len(),
        split.test.len(),
        artifacts.vocab.len()
    );

    let mut models = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        log::info!("training {method}");
        let m = match method {
            Method::Valence => {
                let fc = ForestConfig {
                    seed: cfg.seed,
                    ..cfg.forest.clone()
                };
                TrainedModel::Valence(ValenceClassifier::train(&bal_sessions, &bal_labels, Lexicon::builtin(), &fc)?)
            }
            Method::Ngram => {
                TrainedModel::Ngram(NgramClassifier::train(&bal_sessions, &bal_labels, cfg.ngram_top_k, &cfg.l1)?)
            }
            Method::Neural { cell, include_time } => {
                let mc = ModelConfig {
                    cell,
                    include_time,
                    rng_seed: cfg.seed,
                    ..cfg.model.clone()
                };
                TrainedModel::Neural(NeuralClassifier::train(&balanced, &val_items, artifacts.clone(), &mc)?)
            }
        };
        models.push(m);
    }
    Ok(TrainedSet {
        split,
        artifacts,
        models,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub threshold: f64,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub rows: Vec<MethodResult>,
}

impl EvalReport {
    pub fn get(&self, method: Method) -> Option<&Metrics> {
        let name = method.name();
        self.rows.iter().find(|r| r.method == name).map(|r| &r.metrics)
    }

    /// Method x accuracy / precision / recall / F1.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<10} {:>9} {:>9} {:>9} {:>9}\n",
            "Method", "Accuracy", "Precision", "Recall", "F1"
        );
        for r in &self.rows {
            let m = &r.metrics;
            out.push_str(&format!(
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>9.4}\n",
                r.method, m.accuracy, m.precision, m.recall, m.f1
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Test-set metrics of every model.
pub fn evaluate(models: &[TrainedModel], corpus: &Corpus, split: &Split, threshold: f64) -> Result<EvalReport> {
    let index = by_id(corpus);
    let test = lookup(&index, &split.test)?;
    let (sessions, labels): (Vec<&Session>, Vec<u8>) = test.into_iter().unzip();
    let mut rows = Vec::with_capacity(models.len());
    for m in models {
        let calls = threshold_calls(&m.predict_proba(&sessions)?, threshold);
        rows.push(MethodResult {
            method: m.method().name(),
            metrics: compute_metrics(&calls, &labels)?,
        });
    }
    Ok(EvalReport {
        seed: split.seed,
        threshold,
        n_train: split.train.len(),
        n_val: split.val.len(),
        n_test: split.test.len(),
        rows,
    })
}

pub fn run_experiment(corpus: &Corpus, cfg: &ExperimentConfig) -> Result<(TrainedSet, EvalReport)> {
    let set = train_methods(corpus, cfg)?;
    let report = evaluate(&set.models, corpus, &set.split, cfg.threshold)?;
    Ok((set, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        let names: Vec<String> = Method::ALL.iter().map(|m| m.name()).collect();
        assert_eq!(
            names,
            ["Valence", "Ngram", "RNN", "LSTM", "GRU", "RNN-Time", "LSTM-Time", "GRU-Time"]
        );
        for m in Method::ALL {
            assert_eq!(m.slug().parse::<Method>().unwrap(), m);
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!(parse_methods("all").unwrap().len(), 8);
        assert_eq!(parse_methods("lstm_time,valence").unwrap(), vec![Method::ALL[6], Method::Valence]);
        assert!(parse_methods("lstm,lstm").is_err());
        assert!(parse_methods("svm").is_err());
    }
}
