use std::collections::BTreeMap;
use std::path::Path;

use super::config::ModelConfig;
use super::model::predict_proba;
use super::params::Params;
use super::tensor::Tensor2;
use super::train::EpochRecord;
use crate::container::{parse_key_values, Container};
use crate::error::{Error, Result};
use crate::preprocess::{GapThresholds, TokenSequence, Vocab, PAD_ID};

pub const KIND: &str = "nnet";

/// Fingerprints of the preprocessing artifacts a model was trained with.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fingerprints {
    pub vocab: String,
    pub thresholds: String,
}

impl Fingerprints {
    pub fn of(vocab: &Vocab, thresholds: &GapThresholds) -> Fingerprints {
        Fingerprints {
            vocab: vocab.fingerprint(),
            thresholds: thresholds.fingerprint(),
        }
    }

    pub fn verify(&self, vocab: &Vocab, thresholds: &GapThresholds) -> Result<()> {
        let found = Fingerprints::of(vocab, thresholds);
        if found.vocab != self.vocab {
            return Err(Error::FingerprintMismatch {
                artifact: "vocab",
                expected: self.vocab.clone(),
                found: found.vocab,
            });
        }
        if found.thresholds != self.thresholds {
            return Err(Error::FingerprintMismatch {
                artifact: "gap thresholds",
                expected: self.thresholds.clone(),
                found: found.thresholds,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelCheckpoint {
    pub config: ModelConfig,
    pub params: Params,
    pub fingerprints: Fingerprints,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    /// Free-form text sections carried along (embedded vocab, metrics, ...).
    pub attachments: BTreeMap<String, String>,
}

impl ModelCheckpoint {
    pub fn predict_proba(&self, seqs: &[TokenSequence]) -> Result<Vec<f64>> {
        predict_proba(&self.config, &self.params, seqs)
    }

    pub fn to_container(&self) -> Container {
        let mut c = Container::new(KIND);
        c.put_text("config", self.config.to_text());
        c.put_text(
            "fingerprints",
            format!("vocab = {}\nthresholds = {}\n", self.fingerprints.vocab, self.fingerprints.thresholds),
        );
        let mut hist = format!("best_epoch = {}\n", self.best_epoch);
        for r in &self.history {
            hist.push_str(&format!("{}\t{}\t{}\n", r.epoch, r.train_loss, r.val_loss));
        }
        c.put_text("history", hist);
        for (k, v) in &self.attachments {
            c.put_text(&format!("attach.{k}"), v.clone());
        }
        let p = &self.params;
        let mat = |t: &Tensor2| (vec![t.rows(), t.cols()], t.data().to_vec());
        for (name, (dims, data)) in [
            ("embedding", mat(&p.embedding)),
            ("cell.w_x", mat(&p.w_x)),
            ("cell.w_h", mat(&p.w_h)),
            ("cell.b", (vec![p.b.len()], p.b.clone())),
            ("output.w", (vec![p.out_w.len()], p.out_w.clone())),
            ("output.b", (vec![1], p.out_b.clone())),
        ] {
            c.put_tensor(name, dims, data);
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<ModelCheckpoint> {
        c.expect_kind(KIND)?;
        let config = ModelConfig::parse(c.text("config")?)?;
        let fp = parse_key_values(c.text("fingerprints")?)?;
        let fingerprints = Fingerprints {
            vocab: fp.get("vocab").cloned().unwrap_or_default(),
            thresholds: fp.get("thresholds").cloned().unwrap_or_default(),
        };
        let (best_epoch, history) = parse_history(c.text("history")?)?;
        let mat = |name: &str| -> Result<Tensor2> {
            let t = c.tensor(name)?;
            match t.dims[..] {
                [r, cols] => Tensor2::from_vec(r, cols, t.data.clone()),
                _ => Err(Error::Shape(format!("{name}: expected a matrix, got dims {:?}", t.dims))),
            }
        };
        let vec1 = |name: &str| -> Result<Vec<f64>> {
            let t = c.tensor(name)?;
            if t.dims.len() != 1 {
                return Err(Error::Shape(format!("{name}: expected a vector, got dims {:?}", t.dims)));
            }
            Ok(t.data.clone())
        };
        let params = Params {
            embedding: mat("embedding")?,
            w_x: mat("cell.w_x")?,
            w_h: mat("cell.w_h")?,
            b: vec1("cell.b")?,
            out_w: vec1("output.w")?,
            out_b: vec1("output.b")?,
        };
        params.check_shapes(&config)?;
        if params.embedding.row(PAD_ID as usize).iter().any(|&x| x != 0.0) {
            return Err(Error::Format("checkpoint PAD embedding row is not zero".into()));
        }
        let attachments = c
            .texts
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("attach.").map(|k| (k.to_string(), v.clone())))
            .collect();
        Ok(ModelCheckpoint {
            config,
            params,
            fingerprints,
            history,
            best_epoch,
            attachments,
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.to_container().to_bytes()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_container().save(path)
    }

    pub fn load(path: &Path) -> Result<ModelCheckpoint> {
        ModelCheckpoint::from_container(&Container::load(path)?)
    }
}

fn parse_history(text: &str) -> Result<(usize, Vec<EpochRecord>)> {
    let mut lines = text.lines();
    let best_epoch = lines
        .next()
        .and_then(|l| l.strip_prefix("best_epoch = "))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format("history: missing best_epoch".into()))?;
    let bad = |l: &str| Error::Format(format!("history: bad line {l:?}"));
    let mut out = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(bad(line));
        }
        out.push(EpochRecord {
            epoch: f[0].parse().map_err(|_| bad(line))?,
            train_loss: f[1].parse().map_err(|_| bad(line))?,
            val_loss: f[2].parse().map_err(|_| bad(line))?,
        });
    }
    Ok((best_epoch, out))
}
