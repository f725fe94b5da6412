//! Single-step cell equations and their adjoints.
//!
//! tanh RNN: `h' = tanh(Wx x + Wh h + b)`.
//!
//! LSTM, gates `[i, f, o, g]`: `c' = f*c + i*g`, `h' = o*tanh(c')`.
//!
//! GRU, gates `[z, r, n]`: `n = tanh(Wx_n x + Wh_n (r*h) + b_n)`,
//! `h' = (1 - z)*h + z*n`.
//!
//! The input term `Wx x` arrives precomputed as `proj`, so a batch can share
//! one projection per distinct token.

use super::config::CellType;
use super::params::Params;
use super::tensor::{matvec_acc, matvec_t_acc, outer_acc, sigmoid, Tensor2};
use crate::error::{Error, Result};

/// Hidden state; `c` is only meaningful for the LSTM and stays zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl CellState {
    pub fn zeros(hidden: usize) -> CellState {
        CellState {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// One step from an explicit input vector.
pub fn cell_step(cell: CellType, p: &Params, x: &[f64], state: &CellState) -> Result<CellState> {
    let hd = state.h.len();
    let gh = cell.gates() * hd;
    if x.len() != p.w_x.cols() || p.w_x.rows() != gh || p.w_h.shape() != (gh, hd) || state.c.len() != hd {
        return Err(Error::Shape(format!(
            "{cell} step: x {} / state {} against w_x {:?}, w_h {:?}",
            x.len(),
            hd,
            p.w_x.shape(),
            p.w_h.shape()
        )));
    }
    let mut proj = vec![0.0; gh];
    matvec_acc(p.w_x.data(), x, &mut proj);
    let mut out = CellState::zeros(hd);
    let mut acts = vec![0.0; gh];
    let mut scratch = vec![0.0; 2 * hd];
    forward_step(cell, p, &proj, &state.h, &state.c, &mut acts, &mut out.h, &mut out.c, &mut scratch);
    Ok(out)
}

/// `acts` receives the post-nonlinearity gate values needed by the backward pass.
#[allow(clippy::too_many_arguments)]
pub(crate) fn forward_step(
    cell: CellType,
    p: &Params,
    proj: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    acts: &mut [f64],
    h_out: &mut [f64],
    c_out: &mut [f64],
    scratch: &mut [f64],
) {
    let hd = h_prev.len();
    for ((a, &x), &b) in acts.iter_mut().zip(proj).zip(&p.b) {
        *a = x + b;
    }
    match cell {
        CellType::TanhRnn => {
            matvec_acc(p.w_h.data(), h_prev, acts);
            for (a, h) in acts.iter_mut().zip(h_out.iter_mut()) {
                *a = a.tanh();
                *h = *a;
            }
        }
        CellType::Lstm => {
            matvec_acc(p.w_h.data(), h_prev, acts);
            let (ifo, g) = acts.split_at_mut(3 * hd);
            ifo.iter_mut().for_each(|a| *a = sigmoid(*a));
            g.iter_mut().for_each(|a| *a = a.tanh());
            for k in 0..hd {
                let (i, f, o, g) = (acts[k], acts[hd + k], acts[2 * hd + k], acts[3 * hd + k]);
                let c = f * c_prev[k] + i * g;
                c_out[k] = c;
                h_out[k] = o * c.tanh();
            }
        }
        CellType::Gru => {
            let (zr, n) = acts.split_at_mut(2 * hd);
            matvec_acc(p.w_h.block(0, 2 * hd), h_prev, zr);
            zr.iter_mut().for_each(|a| *a = sigmoid(*a));
            let rh = &mut scratch[..hd];
            for k in 0..hd {
                rh[k] = zr[hd + k] * h_prev[k];
            }
            matvec_acc(p.w_h.block(2 * hd, hd), rh, n);
            n.iter_mut().for_each(|a| *a = a.tanh());
            for k in 0..hd {
                let z = zr[k];
                h_out[k] = (1.0 - z) * h_prev[k] + z * n[k];
            }
        }
    }
}

/// Adjoint of [`forward_step`]. Accumulates into `g.w_h` and `g.b`, writes
/// the pre-activation adjoint to `da` (the caller owns the input-projection
/// gradient), overwrites `dh_prev`, and maps `dc` from step t to step t-1.
#[allow(clippy::too_many_arguments)]
pub(crate) fn backward_step(
    cell: CellType,
    p: &Params,
    g: &mut Params,
    acts: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    c_cur: &[f64],
    dh: &[f64],
    dc: &mut [f64],
    da: &mut [f64],
    dh_prev: &mut [f64],
    scratch: &mut [f64],
) {
    let hd = h_prev.len();
    match cell {
        CellType::TanhRnn => {
            for k in 0..hd {
                da[k] = dh[k] * (1.0 - acts[k] * acts[k]);
            }
            dense_recurrent_grads(&p.w_h, g, da, h_prev, dh_prev);
        }
        CellType::Lstm => {
            for k in 0..hd {
                let (i, f, o, gg) = (acts[k], acts[hd + k], acts[2 * hd + k], acts[3 * hd + k]);
                let tc = c_cur[k].tanh();
                let dck = dc[k] + dh[k] * o * (1.0 - tc * tc);
                da[k] = dck * gg * i * (1.0 - i);
                da[hd + k] = dck * c_prev[k] * f * (1.0 - f);
                da[2 * hd + k] = dh[k] * tc * o * (1.0 - o);
                da[3 * hd + k] = dck * i * (1.0 - gg * gg);
                dc[k] = dck * f;
            }
            dense_recurrent_grads(&p.w_h, g, da, h_prev, dh_prev);
        }
        CellType::Gru => {
            let (rh, drh) = scratch.split_at_mut(hd);
            for k in 0..hd {
                let (z, n) = (acts[k], acts[2 * hd + k]);
                rh[k] = acts[hd + k] * h_prev[k];
                da[2 * hd + k] = dh[k] * z * (1.0 - n * n);
                da[k] = dh[k] * (n - h_prev[k]) * z * (1.0 - z);
                dh_prev[k] = dh[k] * (1.0 - z);
                drh[k] = 0.0;
            }
            let w_n = p.w_h.block(2 * hd, hd);
            matvec_t_acc(w_n, &da[2 * hd..], drh);
            outer_acc(g.w_h.block_mut(2 * hd, hd), &da[2 * hd..], rh);
            for k in 0..hd {
                let r = acts[hd + k];
                da[hd + k] = drh[k] * h_prev[k] * r * (1.0 - r);
                dh_prev[k] += drh[k] * r;
            }
            outer_acc(g.w_h.block_mut(0, 2 * hd), &da[..2 * hd], h_prev);
            matvec_t_acc(p.w_h.block(0, 2 * hd), &da[..2 * hd], dh_prev);
        }
    }
    for (gb, &d) in g.b.iter_mut().zip(da.iter()) {
        *gb += d;
    }
}

fn dense_recurrent_grads(w_h: &Tensor2, g: &mut Params, da: &[f64], h_prev: &[f64], dh_prev: &mut [f64]) {
    outer_acc(g.w_h.data_mut(), da, h_prev);
    dh_prev.iter_mut().for_each(|x| *x = 0.0);
    matvec_t_acc(w_h.data(), da, dh_prev);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnet::config::ModelConfig;

    fn tiny(cell: CellType, e: usize, h: usize) -> (ModelConfig, Params) {
        let mut cfg = ModelConfig::new(cell, false, 4);
        cfg.embed_dim = e;
        cfg.hidden_dim = h;
        let p = Params::zeros(&cfg);
        (cfg, p)
    }

    #[test]
    fn zero_params_zero_state() {
        for cell in CellType::ALL {
            let (_, p) = tiny(cell, 3, 2);
            let s = cell_step(cell, &p, &[1.0, -2.0, 0.5], &CellState::zeros(2)).unwrap();
            assert_eq!(s.h, vec![0.0, 0.0], "{cell}");
        }
    }

    #[test]
    fn zero_params_lstm_with_cell_memory() {
        let (_, p) = tiny(CellType::Lstm, 1, 1);
        let state = CellState { h: vec![0.3], c: vec![2.0] };
        let s = cell_step(CellType::Lstm, &p, &[5.0], &state).unwrap();
        assert_eq!(s.c[0], 1.0);
        assert!((s.h[0] - 0.5 * 1.0f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn scalar_lstm_hand_trace() {
        let (_, mut p) = tiny(CellType::Lstm, 1, 1);
        // gate order i, f, o, g
        p.w_x = Tensor2::from_vec(4, 1, vec![0.5, -0.3, 0.8, 1.2]).unwrap();
        p.w_h = Tensor2::from_vec(4, 1, vec![0.1, 0.2, -0.4, 0.7]).unwrap();
        p.b = vec![0.05, 1.0, -0.1, 0.0];
        let (x, h, c) = (0.9f64, -0.2f64, 0.4f64);
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let i = sig(0.5 * x + 0.1 * h + 0.05);
        let f = sig(-0.3 * x + 0.2 * h + 1.0);
        let o = sig(0.8 * x - 0.4 * h - 0.1);
        let g = (1.2 * x + 0.7 * h).tanh();
        let c1 = f * c + i * g;
        let h1 = o * c1.tanh();
        let s = cell_step(CellType::Lstm, &p, &[x], &CellState { h: vec![h], c: vec![c] }).unwrap();
        assert!((s.c[0] - c1).abs() < 1e-14);
        assert!((s.h[0] - h1).abs() < 1e-14);
    }

    #[test]
    fn scalar_gru_hand_trace() {
        let (_, mut p) = tiny(CellType::Gru, 1, 1);
        p.w_x = Tensor2::from_vec(3, 1, vec![0.4, -0.6, 0.9]).unwrap();
        p.w_h = Tensor2::from_vec(3, 1, vec![0.3, 0.5, -0.8]).unwrap();
        p.b = vec![0.1, 0.0, -0.2];
        let (x, h) = (0.7f64, 0.25f64);
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let z = sig(0.4 * x + 0.3 * h + 0.1);
        let r = sig(-0.6 * x + 0.5 * h);
        let n = (0.9 * x - 0.8 * (r * h) - 0.2).tanh();
        let expect = (1.0 - z) * h + z * n;
        let s = cell_step(CellType::Gru, &p, &[x], &CellState { h: vec![h], c: vec![0.0] }).unwrap();
        assert!((s.h[0] - expect).abs() < 1e-14);
    }

    #[test]
    fn rnn_contracts_without_input() {
        let (_, mut p) = tiny(CellType::TanhRnn, 1, 1);
        p.w_h = Tensor2::from_vec(1, 1, vec![0.5]).unwrap();
        let mut s = CellState { h: vec![0.9], c: vec![0.0] };
        let mut scalar = 0.9f64;
        for _ in 0..20 {
            let next = cell_step(CellType::TanhRnn, &p, &[0.0], &s).unwrap();
            scalar = (0.5 * scalar).tanh();
            assert!(next.h[0].abs() < s.h[0].abs());
            assert_eq!(next.h[0], scalar);
            s = next;
        }
    }

    #[test]
    fn shape_mismatch_is_error() {
        let (_, p) = tiny(CellType::Gru, 3, 2);
        assert!(matches!(cell_step(CellType::Gru, &p, &[1.0], &CellState::zeros(2)), Err(Error::Shape(_))));
        assert!(cell_step(CellType::Lstm, &p, &[1.0, 2.0, 3.0], &CellState::zeros(2)).is_err());
    }
}
