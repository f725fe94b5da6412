use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, AdamState};
use super::checkpoint::{Fingerprints, ModelCheckpoint};
use super::config::ModelConfig;
use super::model::{dropout_mask, loss, run_batch};
use super::params::Params;
use crate::error::{Error, Result};
use crate::preprocess::TokenSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Validation-loss early stopping. An epoch improves when its loss is below
/// the best so far by more than `min_delta`; training stops once `patience`
/// consecutive epochs fail to improve. `patience == 0` never stops early.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    min_delta: f64,
    best: f64,
    best_epoch: usize,
    wait: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize, min_delta: f64) -> EarlyStopping {
        EarlyStopping {
            patience,
            min_delta,
            best: f64::INFINITY,
            best_epoch: 0,
            wait: 0,
        }
    }

    /// Records one epoch; true when it is the new best.
    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> bool {
        if val_loss < self.best - self.min_delta {
            self.best = val_loss;
            self.best_epoch = epoch;
            self.wait = 0;
            true
        } else {
            self.wait += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.patience > 0 && self.wait >= self.patience
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best
    }
}

fn labels(set: &[TokenSequence], what: &str) -> Result<Vec<f64>> {
    set.iter()
        .map(|s| match s.label {
            Some(y @ (0 | 1)) => Ok(y as f64),
            _ => Err(Error::InvalidInput(format!("{what} sequence without a binary label"))),
        })
        .collect()
}

/// Mini-batch Adam with seeded per-epoch shuffling, dropout on the final
/// hidden state, and early stopping on validation loss. Returns the weights
/// of the best validation epoch.
pub fn train(cfg: &ModelConfig, train_set: &[TokenSequence], val_set: &[TokenSequence]) -> Result<ModelCheckpoint> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidInput("training and validation sets must be non-empty".into()));
    }
    let ys = labels(train_set, "training")?;
    labels(val_set, "validation")?;
    let name = cfg.method_name();

    let mut params = Params::init(cfg, cfg.rng_seed);
    let mut best = params.clone();
    let mut adam = AdamState::new(cfg);
    let mut grads = Params::zeros(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut stopper = EarlyStopping::new(cfg.patience, cfg.min_delta);
    let mut history = Vec::new();

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (bi, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let ids: Vec<&[u32]> = chunk.iter().map(|&i| train_set[i].ids.as_slice()).collect();
            let by: Vec<f64> = chunk.iter().map(|&i| ys[i]).collect();
            let masks: Option<Vec<Vec<f64>>> = (cfg.dropout_rate > 0.0)
                .then(|| chunk.iter().map(|_| dropout_mask(&mut rng, cfg.hidden_dim, cfg.dropout_rate)).collect());
            grads.fill_zero();
            let out = run_batch(cfg, &params, &ids, Some(&by), masks.as_deref(), Some(&mut grads))?;
            let batch_loss = out.loss.expect("labels given");
            if !batch_loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    batch: bi + 1,
                    loss: batch_loss,
                });
            }
            loss_sum += batch_loss * chunk.len() as f64;
            adam_step(&mut params, &grads, &mut adam, cfg.learning_rate).map_err(|e| match e {
                Error::NonFinite(_) => Error::Diverged {
                    epoch,
                    batch: bi + 1,
                    loss: f64::NAN,
                },
                other => other,
            })?;
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let val_loss = loss(cfg, &params, val_set)?;
        if !val_loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                batch: 0,
                loss: val_loss,
            });
        }
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
        let improved = stopper.observe(epoch, val_loss);
        if improved {
            best.clone_from(&params);
        }
        log::info!(
            "{name} epoch {epoch}: train loss {train_loss:.5}, val loss {val_loss:.5}{}",
            if improved { " *" } else { "" }
        );
        if stopper.should_stop() {
            log::info!("{name}: early stop after epoch {epoch}, best epoch {}", stopper.best_epoch());
            break;
        }
    }

    Ok(ModelCheckpoint {
        config: cfg.clone(),
        params: best,
        fingerprints: Fingerprints::default(),
        history,
        best_epoch: stopper.best_epoch(),
        attachments: BTreeMap::new(),
    })
}
