use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CellType, ModelConfig};
use super::tensor::Tensor2;
use crate::error::{Error, Result};
use crate::preprocess::PAD_ID;

/// All learnable parameters. Gate blocks are stacked along rows of `w_x`,
/// `w_h` and `b` in [`CellType::gate_names`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// `vocab_size x embed_dim`; the PAD row stays zero.
    pub embedding: Tensor2,
    /// `(gates * hidden) x embed_dim`
    pub w_x: Tensor2,
    /// `(gates * hidden) x hidden`
    pub w_h: Tensor2,
    pub b: Vec<f64>,
    pub out_w: Vec<f64>,
    /// Length 1; a vector so every parameter is a flat slice.
    pub out_b: Vec<f64>,
}

pub const PARAM_NAMES: [&str; 6] = ["embedding", "cell.w_x", "cell.w_h", "cell.b", "output.w", "output.b"];

impl Params {
    pub fn zeros(cfg: &ModelConfig) -> Params {
        let gh = cfg.cell.gates() * cfg.hidden_dim;
        Params {
            embedding: Tensor2::zeros(cfg.vocab_size, cfg.embed_dim),
            w_x: Tensor2::zeros(gh, cfg.embed_dim),
            w_h: Tensor2::zeros(gh, cfg.hidden_dim),
            b: vec![0.0; gh],
            out_w: vec![0.0; cfg.hidden_dim],
            out_b: vec![0.0],
        }
    }

    /// Glorot-uniform weights, zero biases, LSTM forget bias 1, zero PAD row.
    pub fn init(cfg: &ModelConfig, seed: u64) -> Params {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (v, e, h) = (cfg.vocab_size, cfg.embed_dim, cfg.hidden_dim);
        let mut p = Params::zeros(cfg);
        fill_uniform(&mut rng, p.embedding.data_mut(), v, e);
        // Each gate block is its own hidden x fan_in matrix.
        fill_uniform(&mut rng, p.w_x.data_mut(), e, h);
        fill_uniform(&mut rng, p.w_h.data_mut(), h, h);
        fill_uniform(&mut rng, &mut p.out_w, h, 1);
        if cfg.cell == CellType::Lstm {
            p.b[h..2 * h].iter_mut().for_each(|x| *x = 1.0);
        }
        p.embedding.row_mut(PAD_ID as usize).iter_mut().for_each(|x| *x = 0.0);
        p
    }

    pub fn slices(&self) -> [&[f64]; 6] {
        [
            self.embedding.data(),
            self.w_x.data(),
            self.w_h.data(),
            &self.b,
            &self.out_w,
            &self.out_b,
        ]
    }

    pub fn slices_mut(&mut self) -> [&mut [f64]; 6] {
        [
            self.embedding.data_mut(),
            self.w_x.data_mut(),
            self.w_h.data_mut(),
            &mut self.b,
            &mut self.out_w,
            &mut self.out_b,
        ]
    }

    pub fn fill_zero(&mut self) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, s) in PARAM_NAMES.iter().zip(self.slices()) {
            if s.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite((*name).to_string()));
            }
        }
        Ok(())
    }

    pub fn check_shapes(&self, cfg: &ModelConfig) -> Result<()> {
        let z = Params::zeros(cfg);
        let ok = self.embedding.shape() == z.embedding.shape()
            && self.w_x.shape() == z.w_x.shape()
            && self.w_h.shape() == z.w_h.shape()
            && self.b.len() == z.b.len()
            && self.out_w.len() == z.out_w.len()
            && self.out_b.len() == 1;
        if !ok {
            return Err(Error::Shape("parameter shapes do not match the model config".into()));
        }
        Ok(())
    }

    /// Readable name for one scalar, e.g. `cell.w_h[forget][3,7]`.
    pub fn entry_name(cfg: &ModelConfig, param: usize, flat: usize) -> String {
        let h = cfg.hidden_dim;
        let gates = cfg.cell.gate_names();
        match param {
            0 => format!("embedding[{},{}]", flat / cfg.embed_dim, flat % cfg.embed_dim),
            1 | 2 => {
                let cols = if param == 1 { cfg.embed_dim } else { h };
                let (row, col) = (flat / cols, flat % cols);
                format!("{}[{}][{},{}]", PARAM_NAMES[param], gates[row / h], row % h, col)
            }
            3 => format!("cell.b[{}][{}]", gates[flat / h], flat % h),
            4 => format!("output.w[{flat}]"),
            _ => "output.b".to_string(),
        }
    }
}

fn fill_uniform(rng: &mut ChaCha8Rng, data: &mut [f64], fan_in: usize, fan_out: usize) {
    let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for x in data {
        *x = rng.gen_range(-s..s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_rules() {
        let cfg = ModelConfig::new(CellType::Lstm, false, 30);
        let p = Params::init(&cfg, 7);
        assert!(p.embedding.row(0).iter().all(|&x| x == 0.0));
        assert!(p.b[64..128].iter().all(|&x| x == 1.0));
        assert!(p.b[..64].iter().chain(&p.b[128..]).all(|&x| x == 0.0));
        assert_eq!(p, Params::init(&cfg, 7));
        assert_ne!(p, Params::init(&cfg, 8));
        let s = (6.0f64 / (50.0 + 64.0)).sqrt();
        assert!(p.w_x.data().iter().all(|x| x.abs() < s));
    }

    #[test]
    fn names() {
        let mut cfg = ModelConfig::new(CellType::Lstm, false, 10);
        cfg.hidden_dim = 4;
        cfg.embed_dim = 3;
        assert_eq!(Params::entry_name(&cfg, 1, 4 * 3 + 2), "cell.w_x[forget][0,2]");
        assert_eq!(Params::entry_name(&cfg, 3, 13), "cell.b[candidate][1]");
        assert_eq!(Params::entry_name(&cfg, 0, 7), "embedding[2,1]");
    }
}
