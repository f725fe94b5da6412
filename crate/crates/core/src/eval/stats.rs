//! Chi-squared test of independence and inter-rater agreement.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 10_000;

/// Series for P(a, x), good for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Continued fraction for Q(a, x) (modified Lentz), good for x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_p domain: a = {a}, x = {x}");
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_q domain: a = {a}, x = {x}");
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Survival function of the chi-squared distribution.
pub fn chi_squared_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(dof / 2.0, x / 2.0)
}

/// Pearson statistic (no continuity correction) and its 1-dof p-value.
/// `table[r][c]`.
pub fn chi_squared_2x2(table: [[u64; 2]; 2]) -> Result<(f64, f64)> {
    let rows = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let cols = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    let n = (rows[0] + rows[1]) as f64;
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::InvalidInput(format!("contingency table {table:?} has a zero marginal")));
    }
    let mut stat = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let e = rows[r] as f64 * cols[c] as f64 / n;
            let d = table[r][c] as f64 - e;
            stat += d * d / e;
        }
    }
    Ok((stat, chi_squared_sf(stat, 1.0)))
}

/// Unweighted Cohen's kappa with marginal-product chance agreement.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidInput(format!("rater lists of length {} and {}", a.len(), b.len())));
    }
    let n = a.len() as f64;
    let cats: BTreeSet<&T> = a.iter().chain(b).collect();
    let p_o = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let p_e: f64 = cats
        .iter()
        .map(|c| {
            let pa = a.iter().filter(|x| x == c).count() as f64 / n;
            let pb = b.iter().filter(|x| x == c).count() as f64 / n;
            pa * pb
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::InvalidInput("chance agreement is 1; kappa undefined".into()));
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Fleiss' kappa from an items x categories count matrix where every row
/// sums to `raters`.
pub fn fleiss_kappa(counts: &[Vec<u64>], raters: u64) -> Result<f64> {
    if counts.is_empty() || raters < 2 {
        return Err(Error::InvalidInput("need at least one item and two raters".into()));
    }
    let k = counts[0].len();
    for (i, row) in counts.iter().enumerate() {
        if row.len() != k {
            return Err(Error::Shape(format!("item {i} has {} categories, expected {k}", row.len())));
        }
        let s: u64 = row.iter().sum();
        if s != raters {
            return Err(Error::InvalidInput(format!("item {i} has {s} ratings, expected {raters}")));
        }
    }
    let n = raters as f64;
    let items = counts.len() as f64;
    let mut p_j = vec![0.0; k];
    let mut p_bar = 0.0;
    for row in counts {
        let mut sq = 0.0;
        for (j, &c) in row.iter().enumerate() {
            p_j[j] += c as f64;
            sq += (c * c) as f64;
        }
        p_bar += (sq - n) / (n * (n - 1.0));
    }
    p_bar /= items;
    let p_e: f64 = p_j.iter().map(|&s| (s / (items * n)).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::InvalidInput("all ratings in one category; kappa undefined".into()));
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}
