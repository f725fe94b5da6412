use super::config::ModelConfig;
use super::params::Params;
use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Params,
    pub v: Params,
    pub t: u64,
}

impl AdamState {
    pub fn new(cfg: &ModelConfig) -> AdamState {
        AdamState {
            m: Params::zeros(cfg),
            v: Params::zeros(cfg),
            t: 0,
        }
    }
}

/// Bias-corrected Adam update of one flat parameter at step `t >= 1`.
pub fn adam_update(theta: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64], t: u64, lr: f64) {
    let c1 = 1.0 - BETA1.powi(t as i32);
    let c2 = 1.0 - BETA2.powi(t as i32);
    for i in 0..theta.len() {
        m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
        v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        theta[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
}

pub fn adam_step(params: &mut Params, grads: &Params, state: &mut AdamState, lr: f64) -> Result<()> {
    state.t += 1;
    let t = state.t;
    let g = grads.slices();
    let (m, v) = (state.m.slices_mut(), state.v.slices_mut());
    for (((theta, g), m), v) in params.slices_mut().into_iter().zip(g).zip(m).zip(v) {
        if theta.len() != g.len() {
            return Err(Error::Shape("gradient and parameter shapes differ".into()));
        }
        adam_update(theta, g, m, v, t, lr);
    }
    params.check_finite()
}
