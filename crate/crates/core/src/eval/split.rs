use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TEST_FRACTION: f64 = 0.2;
pub const VAL_FRACTION: f64 = 0.2;
pub const MIN_SPLIT_SIZE: usize = 10;
// Streams kept apart from the generator's so equal seeds stay independent.
const SPLIT_STREAM: u64 = u64::MAX - 1;
const OVERSAMPLE_STREAM: u64 = u64::MAX - 2;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Session ids of a train / validation / test partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
}

impl Split {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.val.len(), self.test.len())
    }
}

/// 80/20 outer split, then 80/20 of the outer training part for validation.
pub fn make_split(ids: &[String], seed: u64) -> Result<Split> {
    if ids.len() < MIN_SPLIT_SIZE {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_SPLIT_SIZE} labeled sessions to split, got {}",
            ids.len()
        )));
    }
    let mut order = ids.to_vec();
    order.shuffle(&mut rng(seed, SPLIT_STREAM));
    let n_test = (ids.len() as f64 * TEST_FRACTION).round() as usize;
    let rest = ids.len() - n_test;
    let n_val = (rest as f64 * VAL_FRACTION).round() as usize;
    let test = order.split_off(rest);
    let val = order.split_off(rest - n_val);
    Ok(Split {
        train: order,
        val,
        test,
        seed,
    })
}

/// Resamples the minority class with replacement until both classes have
/// the majority count. Every original item is kept; the result is shuffled.
pub fn oversample_balance<T: Clone>(items: &[(T, u8)], seed: u64) -> Result<Vec<(T, u8)>> {
    let pos: Vec<usize> = (0..items.len()).filter(|&i| items[i].1 != 0).collect();
    let neg: Vec<usize> = (0..items.len()).filter(|&i| items[i].1 == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidInput("oversampling needs both classes present".into()));
    }
    let mut rng = rng(seed, OVERSAMPLE_STREAM);
    let minority = if pos.len() < neg.len() { &pos } else { &neg };
    let extra = pos.len().abs_diff(neg.len());
    let mut out: Vec<(T, u8)> = items.to_vec();
    for _ in 0..extra {
        out.push(items[minority[rng.gen_range(0..minority.len())]].clone());
    }
    out.shuffle(&mut rng);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn hundred_sessions() {
        let s = make_split(&ids(100), 1).unwrap();
        assert_eq!(s.sizes(), (64, 16, 20));
        assert_eq!(make_split(&ids(100), 1).unwrap(), s);
        assert_ne!(make_split(&ids(100), 2).unwrap().train, s.train);
        assert!(make_split(&ids(9), 0).is_err());
    }

    #[test]
    fn oversample_counts() {
        let items: Vec<(usize, u8)> = (0..40).map(|i| (i, u8::from(i < 30))).collect();
        let out = oversample_balance(&items, 5).unwrap();
        assert_eq!(out.iter().filter(|x| x.1 == 1).count(), 30);
        assert_eq!(out.iter().filter(|x| x.1 == 0).count(), 30);
        let balanced: Vec<(usize, u8)> = (0..10).map(|i| (i, (i % 2) as u8)).collect();
        let mut out = oversample_balance(&balanced, 5).unwrap();
        out.sort();
        assert_eq!(out, balanced);
        assert!(oversample_balance(&[(1, 1u8), (2, 1)], 0).is_err());
    }

    #[test]
    fn oversample_large_imbalance() {
        let items: Vec<(u32, u8)> = (0..27_057).map(|i| (i, u8::from(i < 5_498))).collect();
        let out = oversample_balance(&items, 0).unwrap();
        assert_eq!(out.iter().filter(|x| x.1 == 1).count(), 21_559);
        assert_eq!(out.iter().filter(|x| x.1 == 0).count(), 21_559);
    }

    proptest! {
        #[test]
        fn split_partitions(n in 10usize..400, seed in any::<u64>()) {
            let all = ids(n);
            let s = make_split(&all, seed).unwrap();
            let mut seen = BTreeSet::new();
            for id in s.train.iter().chain(&s.val).chain(&s.test) {
                prop_assert!(seen.insert(id.clone()));
            }
            prop_assert_eq!(seen, all.iter().cloned().collect::<BTreeSet<_>>());
            let (tr, va, te) = s.sizes();
            let nf = n as f64;
            prop_assert!((te as f64 - 0.2 * nf).abs() <= 1.0);
            prop_assert!((va as f64 - 0.16 * nf).abs() <= 1.0);
            prop_assert!((tr as f64 - 0.64 * nf).abs() <= 1.0);
        }

        #[test]
        fn oversample_keeps_distinct_items(labels in prop::collection::vec(0u8..2, 2..120), seed in any::<u64>()) {
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let items: Vec<(usize, u8)> = labels.iter().copied().enumerate().collect();
            let out = oversample_balance(&items, seed).unwrap();
            let pos = out.iter().filter(|x| x.1 == 1).count();
            prop_assert_eq!(pos * 2, out.len());
            let distinct: BTreeSet<_> = out.iter().cloned().collect();
            prop_assert_eq!(distinct, items.iter().cloned().collect::<BTreeSet<_>>());
        }
    }
}
