//! L1-regularized logistic regression by proximal gradient (ISTA) with
//! backtracking. Objective: mean logistic loss + `lambda * ||w||_1`, the
//! intercept unpenalized.

use crate::container::{parse_key_values, Container};
use crate::error::{Error, Result};

pub const KIND: &str = "l1logreg";

#[derive(Debug, Clone, PartialEq)]
pub struct L1Config {
    pub lambda: f64,
    /// Stop once one iteration lowers the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for L1Config {
    fn default() -> Self {
        L1Config {
            lambda: 1e-3,
            tol: 1e-7,
            max_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1LogReg {
    pub w: Vec<f64>,
    pub b: f64,
    pub lambda: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl L1LogReg {
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::Shape(format!("model has {} weights, input has {}", self.w.len(), x.len())));
        }
        Ok(self.w.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(crate::nnet::tensor::sigmoid(self.decision(x)?))
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_proba(x)? >= 0.5))
    }

    pub fn nonzero(&self) -> usize {
        self.w.iter().filter(|&&w| w != 0.0).count()
    }

    pub fn to_container(&self) -> Container {
        let mut c = Container::new(KIND);
        c.put_text(
            "meta",
            format!(
                "lambda = {}\nobjective = {}\niterations = {}\nconverged = {}\n",
                self.lambda, self.objective, self.iterations, self.converged
            ),
        );
        c.put_tensor("w", vec![self.w.len()], self.w.clone());
        c.put_tensor("b", vec![1], vec![self.b]);
        c
    }

    pub fn from_container(c: &Container) -> Result<L1LogReg> {
        c.expect_kind(KIND)?;
        let meta = parse_key_values(c.text("meta")?)?;
        fn field<T: std::str::FromStr>(m: &std::collections::BTreeMap<String, String>, k: &str) -> Result<T> {
            m.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Format(format!("l1logreg meta: missing or bad {k}")))
        }
        let b = c.tensor("b")?;
        if b.data.len() != 1 {
            return Err(Error::Shape("l1logreg intercept must be a scalar".into()));
        }
        Ok(L1LogReg {
            w: c.tensor("w")?.data.clone(),
            b: b.data[0],
            lambda: field(&meta, "lambda")?,
            objective: field(&meta, "objective")?,
            iterations: field(&meta, "iterations")?,
            converged: field(&meta, "converged")?,
        })
    }
}

/// Rows kept as (column, value) pairs; n-gram count vectors are mostly zero.
struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn margins(&self, w: &[f64], b: f64, out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = b + row.iter().map(|&(j, v)| w[j] * v).sum::<f64>();
        }
    }
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Mean logistic loss given margins `z`.
fn smooth_loss(z: &[f64], y: &[f64]) -> f64 {
    z.iter().zip(y).map(|(&z, &y)| softplus(z) - y * z).sum::<f64>() / z.len() as f64
}

fn l1(w: &[f64]) -> f64 {
    w.iter().map(|x| x.abs()).sum()
}

pub fn objective(x: &[Vec<f64>], y: &[u8], w: &[f64], b: f64, lambda: f64) -> f64 {
    let z: Vec<f64> = x.iter().map(|r| b + r.iter().zip(w).map(|(a, c)| a * c).sum::<f64>()).collect();
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    smooth_loss(&z, &yf) + lambda * l1(w)
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

pub fn train_l1_logreg(x: &[Vec<f64>], y: &[u8], cfg: &L1Config) -> Result<L1LogReg> {
    Ok(train_l1_logreg_traced(x, y, cfg)?.0)
}

/// Also returns the objective after every iteration (index 0 is the start).
pub fn train_l1_logreg_traced(x: &[Vec<f64>], y: &[u8], cfg: &L1Config) -> Result<(L1LogReg, Vec<f64>)> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidInput(format!("{} feature rows vs {} labels", x.len(), y.len())));
    }
    let d = x[0].len();
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::Shape("feature rows differ in length".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature matrix".into()));
    }
    if !(cfg.lambda >= 0.0) || !(cfg.tol > 0.0) {
        return Err(Error::Config("lambda must be >= 0 and tol > 0".into()));
    }
    let data = Sparse {
        rows: x
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (j, v)).collect())
            .collect(),
    };
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let n = x.len() as f64;

    let (mut w, mut b) = (vec![0.0; d], 0.0);
    let mut z = vec![0.0; x.len()];
    data.margins(&w, b, &mut z);
    let mut f = smooth_loss(&z, &yf);
    let mut obj = f + cfg.lambda * l1(&w);
    let mut trace = vec![obj];
    let mut step_l = 1.0f64;
    let (mut gw, mut w_new, mut z_new) = (vec![0.0; d], vec![0.0; d], vec![0.0; x.len()]);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for ((row, &zi), &yi) in data.rows.iter().zip(&z).zip(&yf) {
            let r = (crate::nnet::tensor::sigmoid(zi) - yi) / n;
            gb += r;
            for &(j, v) in row {
                gw[j] += r * v;
            }
        }
        // Try a longer step first, then halve it until the quadratic model
        // majorizes the smooth loss.
        step_l = (step_l * 0.5).max(1e-12);
        let (f_new, b_new) = loop {
            for j in 0..d {
                w_new[j] = soft_threshold(w[j] - gw[j] / step_l, cfg.lambda / step_l);
            }
            let b_new = b - gb / step_l;
            data.margins(&w_new, b_new, &mut z_new);
            let f_new = smooth_loss(&z_new, &yf);
            let mut lin = gb * (b_new - b);
            let mut sq = (b_new - b) * (b_new - b);
            for j in 0..d {
                let dj = w_new[j] - w[j];
                lin += gw[j] * dj;
                sq += dj * dj;
            }
            if f_new <= f + lin + 0.5 * step_l * sq + 1e-15 * f.abs() || step_l > 1e15 {
                break (f_new, b_new);
            }
            step_l *= 2.0;
        };
        let obj_new = f_new + cfg.lambda * l1(&w_new);
        if obj_new > obj {
            // Only reachable through rounding; keep the previous iterate.
            converged = true;
            break;
        }
        std::mem::swap(&mut w, &mut w_new);
        std::mem::swap(&mut z, &mut z_new);
        b = b_new;
        f = f_new;
        let decrease = obj - obj_new;
        obj = obj_new;
        trace.push(obj);
        if decrease < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("L1 logistic regression stopped at the iteration cap ({}) before converging", cfg.max_iter);
    }
    Ok((
        L1LogReg {
            w,
            b,
            lambda: cfg.lambda,
            objective: obj,
            iterations,
            converged,
        },
        trace,
    ))
}
