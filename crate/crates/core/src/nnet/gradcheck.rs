use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ModelConfig;
use super::model::{dropout_mask, loss_and_gradients, loss_with_masks};
use super::params::{Params, PARAM_NAMES};
use crate::error::Result;
use crate::preprocess::{TokenSequence, PAD_ID};

pub const DEFAULT_EPSILON: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Scalar with the largest error, e.g. `cell.w_h[forget][2,5]`.
    pub worst: String,
    /// Largest error per parameter tensor, in [`PARAM_NAMES`] order.
    pub per_param: Vec<(String, f64)>,
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }
}

pub fn rel_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Initialized weights with random (rather than zero) biases so every
/// parameter carries a non-trivial gradient.
pub fn random_params(cfg: &ModelConfig, seed: u64) -> Params {
    let mut p = Params::init(cfg, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for b in p.b.iter_mut().chain(p.out_b.iter_mut()) {
        *b += rng.gen_range(-0.5..0.5);
    }
    p
}

/// Central differences for every scalar except the pinned PAD row,
/// compared against `analytic`.
pub fn compare_gradients(
    cfg: &ModelConfig,
    params: &Params,
    analytic: &Params,
    batch: &[TokenSequence],
    masks: Option<&[Vec<f64>]>,
    epsilon: f64,
) -> Result<GradCheckReport> {
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: String::new(),
        per_param: Vec::new(),
        checked: 0,
    };
    let pad_row = PAD_ID as usize * cfg.embed_dim..(PAD_ID as usize + 1) * cfg.embed_dim;
    for (pi, name) in PARAM_NAMES.iter().enumerate() {
        let mut worst_here = 0.0f64;
        for k in 0..params.slices()[pi].len() {
            if pi == 0 && pad_row.contains(&k) {
                continue;
            }
            let orig = params.slices()[pi][k];
            probe.slices_mut()[pi][k] = orig + epsilon;
            let up = loss_with_masks(cfg, &probe, batch, masks)?;
            probe.slices_mut()[pi][k] = orig - epsilon;
            let down = loss_with_masks(cfg, &probe, batch, masks)?;
            probe.slices_mut()[pi][k] = orig;
            let numeric = (up - down) / (2.0 * epsilon);
            let err = rel_error(analytic.slices()[pi][k], numeric);
            report.checked += 1;
            worst_here = worst_here.max(err);
            if err > report.max_rel_error || report.worst.is_empty() {
                report.max_rel_error = err;
                report.worst = Params::entry_name(cfg, pi, k);
            }
        }
        report.per_param.push((name.to_string(), worst_here));
    }
    Ok(report)
}

/// Checks BPTT gradients of a random model (seeded from `cfg.rng_seed`) on
/// `batch`, with dropout masks fixed when `cfg.dropout_rate > 0`.
pub fn gradient_check(cfg: &ModelConfig, batch: &[TokenSequence], epsilon: f64) -> Result<GradCheckReport> {
    cfg.validate()?;
    let params = random_params(cfg, cfg.rng_seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(2);
    let masks: Option<Vec<Vec<f64>>> = (cfg.dropout_rate > 0.0)
        .then(|| batch.iter().map(|_| dropout_mask(&mut rng, cfg.hidden_dim, cfg.dropout_rate)).collect());
    let (_, analytic) = loss_and_gradients(cfg, &params, batch, masks.as_deref())?;
    compare_gradients(cfg, &params, &analytic, batch, masks.as_deref(), epsilon)
}

/// Random labeled sequences of varied true length drawn from the whole
/// vocabulary (gap-token ids included).
pub fn random_batch(cfg: &ModelConfig, n: usize, seed: u64) -> Vec<TokenSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.gen_range(cfg.max_len / 2..=cfg.max_len).max(1);
            let ids: Vec<u32> = (0..len).map(|_| rng.gen_range(1..cfg.vocab_size as u32)).collect();
            TokenSequence::from_stream(&ids, cfg.max_len, Some((i % 2) as u8))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnet::config::CellType;

    fn cfg(cell: CellType) -> ModelConfig {
        let mut c = ModelConfig::new(cell, true, 20);
        c.embed_dim = 5;
        c.hidden_dim = 8;
        c.max_len = 12;
        c.rng_seed = 17;
        c
    }

    #[test]
    fn all_cells_pass() {
        for cell in CellType::ALL {
            let c = cfg(cell);
            let batch = random_batch(&c, 4, 5);
            let r = gradient_check(&c, &batch, DEFAULT_EPSILON).unwrap();
            assert!(r.passed(TOLERANCE), "{cell}: {} at {}", r.max_rel_error, r.worst);
        }
    }

    #[test]
    fn corrupted_gradient_is_flagged() {
        let c = cfg(CellType::Lstm);
        let batch = random_batch(&c, 4, 5);
        let params = random_params(&c, 3);
        let (_, mut g) = loss_and_gradients(&c, &params, &batch, None).unwrap();
        let k = 2 * c.hidden_dim + 3;
        g.w_h.data_mut()[k] *= 2.0;
        let r = compare_gradients(&c, &params, &g, &batch, None, DEFAULT_EPSILON).unwrap();
        assert!(!r.passed(TOLERANCE));
        assert_eq!(r.worst, Params::entry_name(&c, 2, k));
    }
}
