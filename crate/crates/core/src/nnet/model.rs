//! Forward pass, loss and exact BPTT gradients over a batch.
//!
//! PAD embeds to the zero vector, so every sequence's leading PAD block is
//! the same zero-input trajectory from the zero state. The batch computes
//! that trajectory once, starts each sequence from the state at its own pad
//! length, and sends the summed adjoints back through the shared prefix in
//! one pass. Input projections `Wx e[id]` are likewise computed and
//! differentiated once per distinct token.

use std::collections::HashMap;

use rand::Rng;

use super::cell::{backward_step, forward_step};
use super::config::ModelConfig;
use super::params::Params;
use super::tensor::{axpy, dot, matvec_acc, matvec_t_acc, outer_acc, sigmoid};
use crate::error::{Error, Result};
use crate::preprocess::{TokenSequence, PAD_ID};

const P_CLAMP: f64 = 1e-12;

/// Binary cross-entropy with `p` clamped away from 0 and 1.
pub fn bce(p: f64, y: f64) -> f64 {
    let p = p.clamp(P_CLAMP, 1.0 - P_CLAMP);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Inverted-dropout scale vector: 0 for dropped units, `1/(1-rate)` otherwise.
pub fn dropout_mask<R: Rng>(rng: &mut R, hidden: usize, rate: f64) -> Vec<f64> {
    let keep = 1.0 / (1.0 - rate);
    (0..hidden).map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep }).collect()
}

pub(crate) struct BatchOutput {
    pub probs: Vec<f64>,
    /// Mean BCE plus the output-layer L2 term; present when labels were given.
    pub loss: Option<f64>,
}

fn check_ids(cfg: &ModelConfig, ids: &[u32]) -> Result<()> {
    if ids.len() != cfg.max_len {
        return Err(Error::Shape(format!("sequence length {} != max_len {}", ids.len(), cfg.max_len)));
    }
    if let Some(&id) = ids.iter().find(|&&id| id as usize >= cfg.vocab_size) {
        return Err(Error::TokenOutOfRange {
            id,
            vocab_size: cfg.vocab_size,
        });
    }
    Ok(())
}

fn labels_of(batch: &[TokenSequence]) -> Result<Vec<f64>> {
    batch
        .iter()
        .map(|s| match s.label {
            Some(y @ (0 | 1)) => Ok(y as f64),
            Some(y) => Err(Error::InvalidInput(format!("label {y} is not binary"))),
            None => Err(Error::InvalidInput("training sequence without a label".into())),
        })
        .collect()
}

/// The batch engine behind every public entry point. `masks` holds one
/// dropout scale vector per item; `grads` (zeroed by the caller) receives
/// the gradient of the mean loss.
pub(crate) fn run_batch(
    cfg: &ModelConfig,
    p: &Params,
    seqs: &[&[u32]],
    labels: Option<&[f64]>,
    masks: Option<&[Vec<f64>]>,
    mut grads: Option<&mut Params>,
) -> Result<BatchOutput> {
    let (hd, gh) = (cfg.hidden_dim, cfg.cell.gates() * cfg.hidden_dim);
    for s in seqs {
        check_ids(cfg, s)?;
    }
    if grads.is_some() && labels.is_none() {
        return Err(Error::InvalidInput("gradients need labels".into()));
    }
    let n = seqs.len();
    let lead: Vec<usize> = seqs.iter().map(|s| s.iter().take_while(|&&id| id == PAD_ID).count()).collect();

    let mut slot_of: HashMap<u32, usize> = HashMap::new();
    let mut slot_ids: Vec<u32> = Vec::new();
    for (s, &l) in seqs.iter().zip(&lead) {
        for &id in &s[l..] {
            if id != PAD_ID {
                slot_of.entry(id).or_insert_with(|| {
                    slot_ids.push(id);
                    slot_ids.len() - 1
                });
            }
        }
    }
    let mut proj = vec![0.0; slot_ids.len() * gh];
    for (slot, &id) in slot_ids.iter().enumerate() {
        matvec_acc(p.w_x.data(), p.embedding.row(id as usize), &mut proj[slot * gh..(slot + 1) * gh]);
    }
    let zero_proj = vec![0.0; gh];
    let mut scratch = vec![0.0; 2 * hd];

    let max_lead = lead.iter().copied().max().unwrap_or(0);
    let mut pre_h = vec![0.0; (max_lead + 1) * hd];
    let mut pre_c = vec![0.0; (max_lead + 1) * hd];
    let mut pre_acts = vec![0.0; max_lead * gh];
    for k in 0..max_lead {
        let (h_lo, h_hi) = pre_h.split_at_mut((k + 1) * hd);
        let (c_lo, c_hi) = pre_c.split_at_mut((k + 1) * hd);
        forward_step(
            cfg.cell,
            p,
            &zero_proj,
            &h_lo[k * hd..],
            &c_lo[k * hd..],
            &mut pre_acts[k * gh..(k + 1) * gh],
            &mut h_hi[..hd],
            &mut c_hi[..hd],
            &mut scratch,
        );
    }

    let max_tail = cfg.max_len - lead.iter().copied().min().unwrap_or(cfg.max_len);
    let mut hs = vec![0.0; (max_tail + 1) * hd];
    let mut cs = vec![0.0; (max_tail + 1) * hd];
    let mut acts = vec![0.0; max_tail * gh];
    let mut hfinal = vec![0.0; hd];

    let backprop = grads.is_some();
    let mut dproj = if backprop { vec![0.0; slot_ids.len() * gh] } else { Vec::new() };
    let mut adj_h = if backprop { vec![0.0; (max_lead + 1) * hd] } else { Vec::new() };
    let mut adj_c = adj_h.clone();
    let (mut dh, mut dh_prev, mut dc, mut da) = (vec![0.0; hd], vec![0.0; hd], vec![0.0; hd], vec![0.0; gh]);

    let mut probs = Vec::with_capacity(n);
    let mut bce_sum = 0.0;
    for i in 0..n {
        let (s, l) = (seqs[i], lead[i]);
        let tail = &s[l..];
        let t_len = tail.len();
        hs[..hd].copy_from_slice(&pre_h[l * hd..(l + 1) * hd]);
        cs[..hd].copy_from_slice(&pre_c[l * hd..(l + 1) * hd]);
        for (t, &id) in tail.iter().enumerate() {
            let x = if id == PAD_ID {
                &zero_proj[..]
            } else {
                let slot = slot_of[&id];
                &proj[slot * gh..(slot + 1) * gh]
            };
            let (h_lo, h_hi) = hs.split_at_mut((t + 1) * hd);
            let (c_lo, c_hi) = cs.split_at_mut((t + 1) * hd);
            forward_step(
                cfg.cell,
                p,
                x,
                &h_lo[t * hd..],
                &c_lo[t * hd..],
                &mut acts[t * gh..(t + 1) * gh],
                &mut h_hi[..hd],
                &mut c_hi[..hd],
                &mut scratch,
            );
        }
        let h_t = &hs[t_len * hd..(t_len + 1) * hd];
        hfinal.copy_from_slice(h_t);
        if let Some(m) = masks {
            hfinal.iter_mut().zip(&m[i]).for_each(|(h, s)| *h *= s);
        }
        let prob = sigmoid(dot(&p.out_w, &hfinal) + p.out_b[0]);
        probs.push(prob);
        let Some(ys) = labels else { continue };
        bce_sum += bce(prob, ys[i]);
        let Some(g) = grads.as_deref_mut() else { continue };

        let dz = (prob - ys[i]) / n as f64;
        axpy(dz, &hfinal, &mut g.out_w);
        g.out_b[0] += dz;
        for k in 0..hd {
            dh[k] = dz * p.out_w[k] * masks.map_or(1.0, |m| m[i][k]);
            dc[k] = 0.0;
        }
        for t in (0..t_len).rev() {
            backward_step(
                cfg.cell,
                p,
                g,
                &acts[t * gh..(t + 1) * gh],
                &hs[t * hd..(t + 1) * hd],
                &cs[t * hd..(t + 1) * hd],
                &cs[(t + 1) * hd..(t + 2) * hd],
                &dh,
                &mut dc,
                &mut da,
                &mut dh_prev,
                &mut scratch,
            );
            let id = tail[t];
            if id != PAD_ID {
                let slot = slot_of[&id];
                axpy(1.0, &da, &mut dproj[slot * gh..(slot + 1) * gh]);
            }
            std::mem::swap(&mut dh, &mut dh_prev);
        }
        axpy(1.0, &dh, &mut adj_h[l * hd..(l + 1) * hd]);
        axpy(1.0, &dc, &mut adj_c[l * hd..(l + 1) * hd]);
    }

    let loss = labels.map(|_| {
        let l2 = cfg.l2_lambda * (dot(&p.out_w, &p.out_w) + p.out_b[0] * p.out_b[0]);
        bce_sum / n.max(1) as f64 + l2
    });

    if let Some(g) = grads {
        for k in (1..=max_lead).rev() {
            dh.copy_from_slice(&adj_h[k * hd..(k + 1) * hd]);
            dc.copy_from_slice(&adj_c[k * hd..(k + 1) * hd]);
            backward_step(
                cfg.cell,
                p,
                g,
                &pre_acts[(k - 1) * gh..k * gh],
                &pre_h[(k - 1) * hd..k * hd],
                &pre_c[(k - 1) * hd..k * hd],
                &pre_c[k * hd..(k + 1) * hd],
                &dh,
                &mut dc,
                &mut da,
                &mut dh_prev,
                &mut scratch,
            );
            axpy(1.0, &dh_prev, &mut adj_h[(k - 1) * hd..k * hd]);
            axpy(1.0, &dc, &mut adj_c[(k - 1) * hd..k * hd]);
        }
        for (slot, &id) in slot_ids.iter().enumerate() {
            let d = &dproj[slot * gh..(slot + 1) * gh];
            outer_acc(g.w_x.data_mut(), d, p.embedding.row(id as usize));
            matvec_t_acc(p.w_x.data(), d, g.embedding.row_mut(id as usize));
        }
        axpy(2.0 * cfg.l2_lambda, &p.out_w, &mut g.out_w);
        g.out_b[0] += 2.0 * cfg.l2_lambda * p.out_b[0];
        g.embedding.row_mut(PAD_ID as usize).iter_mut().for_each(|x| *x = 0.0);
    }
    Ok(BatchOutput { probs, loss })
}

/// Probability of dissatisfaction for one sequence, stepping through every
/// position (PAD included) from the zero state. With `dropout_rng` set, a
/// fresh inverted-dropout mask is applied to the final hidden state.
pub fn forward<R: Rng>(cfg: &ModelConfig, p: &Params, seq: &TokenSequence, dropout_rng: Option<&mut R>) -> Result<f64> {
    check_ids(cfg, &seq.ids)?;
    let (hd, gh) = (cfg.hidden_dim, cfg.cell.gates() * cfg.hidden_dim);
    let (mut h, mut c) = (vec![0.0; hd], vec![0.0; hd]);
    let (mut h2, mut c2) = (vec![0.0; hd], vec![0.0; hd]);
    let mut acts = vec![0.0; gh];
    let mut proj = vec![0.0; gh];
    let mut scratch = vec![0.0; 2 * hd];
    for &id in &seq.ids {
        proj.iter_mut().for_each(|x| *x = 0.0);
        if id != PAD_ID {
            matvec_acc(p.w_x.data(), p.embedding.row(id as usize), &mut proj);
        }
        forward_step(cfg.cell, p, &proj, &h, &c, &mut acts, &mut h2, &mut c2, &mut scratch);
        std::mem::swap(&mut h, &mut h2);
        std::mem::swap(&mut c, &mut c2);
    }
    if let Some(rng) = dropout_rng {
        let m = dropout_mask(rng, hd, cfg.dropout_rate);
        h.iter_mut().zip(&m).for_each(|(x, s)| *x *= s);
    }
    Ok(sigmoid(dot(&p.out_w, &h) + p.out_b[0]))
}

/// Final hidden state without dropout.
pub fn final_hidden(cfg: &ModelConfig, p: &Params, seq: &TokenSequence) -> Result<Vec<f64>> {
    check_ids(cfg, &seq.ids)?;
    let hd = cfg.hidden_dim;
    let mut s = super::cell::CellState::zeros(hd);
    for &id in &seq.ids {
        let x = if id == PAD_ID { vec![0.0; cfg.embed_dim] } else { p.embedding.row(id as usize).to_vec() };
        s = super::cell::cell_step(cfg.cell, p, &x, &s)?;
    }
    Ok(s.h)
}

/// Evaluation-mode probabilities for many sequences.
pub fn predict_proba(cfg: &ModelConfig, p: &Params, seqs: &[TokenSequence]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(seqs.len());
    for chunk in seqs.chunks(256) {
        let ids: Vec<&[u32]> = chunk.iter().map(|s| s.ids.as_slice()).collect();
        out.extend(run_batch(cfg, p, &ids, None, None, None)?.probs);
    }
    Ok(out)
}

/// Evaluation-mode mean loss over a labeled batch.
pub fn loss(cfg: &ModelConfig, p: &Params, batch: &[TokenSequence]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("loss over an empty batch".into()));
    }
    let labels = labels_of(batch)?;
    let ids: Vec<&[u32]> = batch.iter().map(|s| s.ids.as_slice()).collect();
    Ok(run_batch(cfg, p, &ids, Some(&labels), None, None)?.loss.expect("labels given"))
}

/// Loss and its exact gradient. `masks` fixes the dropout pattern; `None`
/// evaluates without dropout.
pub fn loss_and_gradients(
    cfg: &ModelConfig,
    p: &Params,
    batch: &[TokenSequence],
    masks: Option<&[Vec<f64>]>,
) -> Result<(f64, Params)> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("gradients over an empty batch".into()));
    }
    if let Some(m) = masks {
        if m.len() != batch.len() || m.iter().any(|v| v.len() != cfg.hidden_dim) {
            return Err(Error::Shape("one dropout mask of hidden_dim entries per item".into()));
        }
    }
    let labels = labels_of(batch)?;
    let ids: Vec<&[u32]> = batch.iter().map(|s| s.ids.as_slice()).collect();
    let mut g = Params::zeros(cfg);
    let out = run_batch(cfg, p, &ids, Some(&labels), masks, Some(&mut g))?;
    Ok((out.loss.expect("labels given"), g))
}

/// Evaluation-mode gradient of [`loss`].
pub fn gradients(cfg: &ModelConfig, p: &Params, batch: &[TokenSequence]) -> Result<Params> {
    Ok(loss_and_gradients(cfg, p, batch, None)?.1)
}

/// Loss with fixed dropout masks, for finite differences against
/// [`loss_and_gradients`].
pub(crate) fn loss_with_masks(cfg: &ModelConfig, p: &Params, batch: &[TokenSequence], masks: Option<&[Vec<f64>]>) -> Result<f64> {
    let labels = labels_of(batch)?;
    let ids: Vec<&[u32]> = batch.iter().map(|s| s.ids.as_slice()).collect();
    Ok(run_batch(cfg, p, &ids, Some(&labels), masks, None)?.loss.expect("labels given"))
}
