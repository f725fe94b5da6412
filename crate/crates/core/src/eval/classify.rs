//! Session-level classifiers behind a common interface: the Valence and
//! Ngram baselines and the recurrent models.

use crate::baselines::{train_forest, train_l1_logreg, ForestConfig, L1Config, L1LogReg, RandomForest};
use crate::chatlog::Session;
use crate::container::Container;
use crate::error::{Error, Result};
use crate::ngram::{build_ngram_vocab, ngram_features, NgramOrder, NgramVocab};
use crate::nnet::{train, Fingerprints, ModelCheckpoint, ModelConfig};
use crate::preprocess::{Artifacts, GapThresholds, TokenSequence, Vocab};
use crate::valence::{affect_features, Lexicon};

pub trait SessionClassifier {
    fn name(&self) -> String;

    /// Probability of the dissatisfied class per session, in input order.
    fn predict_proba(&self, sessions: &[&Session]) -> Result<Vec<f64>>;
}

fn check_labels(sessions: &[&Session], labels: &[u8]) -> Result<()> {
    if sessions.len() != labels.len() || sessions.is_empty() {
        return Err(Error::InvalidInput(format!("{} sessions vs {} labels", sessions.len(), labels.len())));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ValenceClassifier {
    pub lexicon: Lexicon,
    pub forest: RandomForest,
}

impl ValenceClassifier {
    pub fn train(sessions: &[&Session], labels: &[u8], lexicon: Lexicon, cfg: &ForestConfig) -> Result<Self> {
        check_labels(sessions, labels)?;
        let x: Vec<Vec<f64>> = sessions.iter().map(|s| affect_features(s, &lexicon).as_slice().to_vec()).collect();
        Ok(ValenceClassifier {
            forest: train_forest(&x, labels, cfg)?,
            lexicon,
        })
    }

    pub fn to_container(&self) -> Container {
        let mut c = self.forest.to_container();
        c.put_text("lexicon_fingerprint", self.lexicon.fingerprint());
        c
    }

    pub fn from_container(c: &Container, lexicon: Lexicon) -> Result<Self> {
        let expected = c.text("lexicon_fingerprint")?;
        let found = lexicon.fingerprint();
        if expected != found {
            return Err(Error::FingerprintMismatch {
                artifact: "lexicon",
                expected: expected.to_string(),
                found,
            });
        }
        Ok(ValenceClassifier {
            forest: RandomForest::from_container(c)?,
            lexicon,
        })
    }
}

impl SessionClassifier for ValenceClassifier {
    fn name(&self) -> String {
        "Valence".into()
    }

    fn predict_proba(&self, sessions: &[&Session]) -> Result<Vec<f64>> {
        sessions
            .iter()
            .map(|s| self.forest.predict_proba(affect_features(s, &self.lexicon).as_slice()))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct NgramClassifier {
    pub vocab: NgramVocab,
    pub model: L1LogReg,
}

impl NgramClassifier {
    pub fn train(sessions: &[&Session], labels: &[u8], top_k: usize, cfg: &L1Config) -> Result<Self> {
        check_labels(sessions, labels)?;
        let vocab = build_ngram_vocab(sessions.iter().copied(), top_k, NgramOrder::UniAndBigrams);
        let x: Vec<Vec<f64>> = sessions.iter().map(|s| ngram_features(s, &vocab)).collect();
        Ok(NgramClassifier {
            model: train_l1_logreg(&x, labels, cfg)?,
            vocab,
        })
    }

    pub fn to_container(&self) -> Container {
        let mut c = self.model.to_container();
        c.put_text("ngram_vocab", self.vocab.to_text());
        c
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        let vocab = NgramVocab::read(c.text("ngram_vocab")?.as_bytes())?;
        let model = L1LogReg::from_container(c)?;
        if model.w.len() != vocab.len() {
            return Err(Error::Shape(format!("{} weights for {} n-grams", model.w.len(), vocab.len())));
        }
        Ok(NgramClassifier { vocab, model })
    }
}

impl SessionClassifier for NgramClassifier {
    fn name(&self) -> String {
        "Ngram".into()
    }

    fn predict_proba(&self, sessions: &[&Session]) -> Result<Vec<f64>> {
        sessions
            .iter()
            .map(|s| self.model.predict_proba(&ngram_features(s, &self.vocab)))
            .collect()
    }
}

/// A recurrent checkpoint bound to the preprocessing artifacts it was
/// trained with.
#[derive(Debug, Clone)]
pub struct NeuralClassifier {
    pub checkpoint: ModelCheckpoint,
    pub artifacts: Artifacts,
}

const VOCAB_ATTACHMENT: &str = "vocab";
const THRESHOLDS_ATTACHMENT: &str = "thresholds";

impl NeuralClassifier {
    /// Fails unless `artifacts` match the checkpoint's fingerprints.
    pub fn bind(checkpoint: ModelCheckpoint, artifacts: Artifacts) -> Result<Self> {
        checkpoint.fingerprints.verify(&artifacts.vocab, &artifacts.thresholds)?;
        if artifacts.vocab.len() != checkpoint.config.vocab_size {
            return Err(Error::Shape(format!(
                "vocabulary of {} ids for a model of {}",
                artifacts.vocab.len(),
                checkpoint.config.vocab_size
            )));
        }
        Ok(NeuralClassifier { checkpoint, artifacts })
    }

    /// Binds to the artifacts embedded in the checkpoint itself.
    pub fn from_checkpoint(checkpoint: ModelCheckpoint) -> Result<Self> {
        let get = |k: &str| {
            checkpoint
                .attachments
                .get(k)
                .ok_or_else(|| Error::Format(format!("checkpoint has no embedded {k}")))
        };
        let artifacts = Artifacts {
            vocab: Vocab::read(get(VOCAB_ATTACHMENT)?.as_bytes())?,
            thresholds: GapThresholds::parse(get(THRESHOLDS_ATTACHMENT)?)?,
        };
        NeuralClassifier::bind(checkpoint, artifacts)
    }

    /// Encodes, trains and stamps the checkpoint with fingerprints and the
    /// embedded artifacts. `cfg.vocab_size` is overwritten.
    pub fn train(
        train_sessions: &[(&Session, u8)],
        val_sessions: &[(&Session, u8)],
        artifacts: Artifacts,
        cfg: &ModelConfig,
    ) -> Result<Self> {
        let mut cfg = cfg.clone();
        cfg.vocab_size = artifacts.vocab.len();
        let encode = |set: &[(&Session, u8)]| -> Result<Vec<TokenSequence>> {
            set.iter()
                .map(|&(s, y)| {
                    let mut seq = artifacts.encode(s, cfg.include_time, cfg.max_len)?;
                    seq.label = Some(y);
                    Ok(seq)
                })
                .collect()
        };
        let mut checkpoint = train(&cfg, &encode(train_sessions)?, &encode(val_sessions)?)?;
        checkpoint.fingerprints = Fingerprints::of(&artifacts.vocab, &artifacts.thresholds);
        checkpoint.attachments.insert(VOCAB_ATTACHMENT.into(), artifacts.vocab.to_text());
        checkpoint.attachments.insert(THRESHOLDS_ATTACHMENT.into(), artifacts.thresholds.to_text());
        Ok(NeuralClassifier { checkpoint, artifacts })
    }

    pub fn encode(&self, sessions: &[&Session]) -> Result<Vec<TokenSequence>> {
        let cfg = &self.checkpoint.config;
        sessions
            .iter()
            .map(|s| self.artifacts.encode(s, cfg.include_time, cfg.max_len))
            .collect()
    }
}

impl SessionClassifier for NeuralClassifier {
    fn name(&self) -> String {
        self.checkpoint.config.method_name()
    }

    fn predict_proba(&self, sessions: &[&Session]) -> Result<Vec<f64>> {
        if sessions.is_empty() {
            return Ok(Vec::new());
        }
        self.checkpoint.predict_proba(&self.encode(sessions)?)
    }
}
