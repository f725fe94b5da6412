use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::container::{parse_key_values, Container};
use crate::error::{Error, Result};

pub const KIND: &str = "forest";

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_features: None,
            max_depth: None,
            min_samples_leaf: 1,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf { p: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Binary tree stored as a node arena with the root at index 0. Samples
/// with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { p } => return p,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
            }
        }
        walk(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
}

impl RandomForest {
    /// Mean of the trees' leaf probabilities.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::Shape(format!("forest expects {} features, got {}", self.n_features, x.len())));
        }
        Ok(self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64)
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_proba(x)? >= 0.5))
    }

    pub fn to_container(&self) -> Container {
        let mut c = Container::new(KIND);
        c.put_text("meta", format!("n_features = {}\nn_trees = {}\n", self.n_features, self.trees.len()));
        for (i, t) in self.trees.iter().enumerate() {
            let mut data = Vec::with_capacity(t.nodes.len() * 5);
            for n in &t.nodes {
                match *n {
                    Node::Leaf { p } => data.extend([-1.0, 0.0, 0.0, 0.0, p]),
                    Node::Split { feature, threshold, left, right } => {
                        data.extend([feature as f64, threshold, left as f64, right as f64, 0.0])
                    }
                }
            }
            c.put_tensor(&format!("tree.{i:04}"), vec![t.nodes.len(), 5], data);
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<RandomForest> {
        c.expect_kind(KIND)?;
        let meta = parse_key_values(c.text("meta")?)?;
        let num = |k: &str| -> Result<usize> {
            meta.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Format(format!("forest meta: missing {k}")))
        };
        let (n_features, n_trees) = (num("n_features")?, num("n_trees")?);
        let mut trees = Vec::with_capacity(n_trees);
        for i in 0..n_trees {
            let t = c.tensor(&format!("tree.{i:04}"))?;
            let n = t.dims[0];
            let mut nodes = Vec::with_capacity(n);
            for row in t.data.chunks_exact(5) {
                if row[0] < 0.0 {
                    nodes.push(Node::Leaf { p: row[4] });
                } else {
                    let (f, l, r) = (row[0] as usize, row[2] as usize, row[3] as usize);
                    if f >= n_features || l >= n || r >= n {
                        return Err(Error::Format(format!("forest tree {i}: node index out of range")));
                    }
                    nodes.push(Node::Split {
                        feature: f,
                        threshold: row[1],
                        left: l,
                        right: r,
                    });
                }
            }
            if nodes.is_empty() {
                return Err(Error::Format(format!("forest tree {i} is empty")));
            }
            trees.push(DecisionTree { nodes });
        }
        if trees.is_empty() {
            return Err(Error::Format("forest has no trees".into()));
        }
        Ok(RandomForest { trees, n_features })
    }
}

pub fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u8],
    cfg: &'a ForestConfig,
    m: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl Grower<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        self.nodes.push(Node::Leaf {
            p: pos as f64 / idx.len() as f64,
        });
        self.nodes.len() - 1
    }

    fn best_on(&self, idx: &[usize], feature: usize, order: &mut Vec<usize>) -> Option<BestSplit> {
        order.clear();
        order.extend_from_slice(idx);
        order.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]));
        let n = order.len();
        let total_pos = order.iter().filter(|&&i| self.y[i] == 1).count();
        let min_leaf = self.cfg.min_samples_leaf.max(1);
        let mut left_pos = 0;
        let mut best: Option<BestSplit> = None;
        for k in 1..n {
            left_pos += usize::from(self.y[order[k - 1]] == 1);
            let (a, b) = (self.x[order[k - 1]][feature], self.x[order[k]][feature]);
            if a == b || k < min_leaf || n - k < min_leaf {
                continue;
            }
            let imp = (k as f64 * gini(left_pos, k) + (n - k) as f64 * gini(total_pos - left_pos, n - k)) / n as f64;
            if best.as_ref().map_or(true, |s| imp < s.impurity) {
                let mid = a + (b - a) / 2.0;
                best = Some(BestSplit {
                    feature,
                    threshold: if mid < b { mid } else { a },
                    impurity: imp,
                });
            }
        }
        best
    }

    fn grow(&mut self, idx: &[usize], depth: usize) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let pure = pos == 0 || pos == idx.len();
        let depth_capped = self.cfg.max_depth.map_or(false, |d| depth >= d);
        if pure || depth_capped || idx.len() < 2 * self.cfg.min_samples_leaf.max(1) {
            return self.leaf(idx);
        }
        let d = self.x[0].len();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(&mut self.rng);
        let mut order = Vec::with_capacity(idx.len());
        let mut best: Option<BestSplit> = None;
        // Try the first m features; if none splits, keep going through the rest.
        for (tried, &f) in features.iter().enumerate() {
            if tried >= self.m && best.is_some() {
                break;
            }
            if let Some(s) = self.best_on(idx, f, &mut order) {
                if best.as_ref().map_or(true, |b| s.impurity < b.impurity) {
                    best = Some(s);
                }
            }
        }
        let Some(split) = best else {
            return self.leaf(idx);
        };
        debug_assert!(split.impurity <= gini(pos, idx.len()) + 1e-12);
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][split.feature] <= split.threshold);
        debug_assert!(!left.is_empty() && !right.is_empty());
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { p: 0.0 });
        let l = self.grow(&left, depth + 1);
        let r = self.grow(&right, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: l,
            right: r,
        };
        slot
    }
}

fn validate(x: &[Vec<f64>], y: &[u8]) -> Result<usize> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidInput(format!("{} feature rows vs {} labels", x.len(), y.len())));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(Error::Shape("feature rows must share a positive length".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature matrix".into()));
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::InvalidInput("labels must be 0 or 1".into()));
    }
    Ok(d)
}

/// One unbootstrapped tree that considers every feature at each split.
pub fn train_tree(x: &[Vec<f64>], y: &[u8], cfg: &ForestConfig) -> Result<DecisionTree> {
    let d = validate(x, y)?;
    let mut g = Grower {
        x,
        y,
        cfg,
        m: d,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        nodes: Vec::new(),
    };
    let idx: Vec<usize> = (0..x.len()).collect();
    g.grow(&idx, 0);
    Ok(DecisionTree { nodes: g.nodes })
}

pub fn train_forest(x: &[Vec<f64>], y: &[u8], cfg: &ForestConfig) -> Result<RandomForest> {
    let d = validate(x, y)?;
    if cfg.n_trees == 0 {
        return Err(Error::Config("n_trees must be positive".into()));
    }
    let m = cfg.max_features.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize).clamp(1, d);
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        log::warn!("random forest trained on a single class; it will predict that class everywhere");
    }
    let n = x.len();
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for t in 0..cfg.n_trees {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t as u64);
        let idx: Vec<usize> = if cfg.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let mut g = Grower {
            x,
            y,
            cfg,
            m,
            rng,
            nodes: Vec::new(),
        };
        g.grow(&idx, 0);
        trees.push(DecisionTree { nodes: g.nodes });
    }
    Ok(RandomForest { trees, n_features: d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x: Vec<Vec<f64>> = (-10..10).map(|i| vec![i as f64 + 0.5]).collect();
        let y = x.iter().map(|r| u8::from(r[0] >= 0.0)).collect();
        (x, y)
    }

    fn accuracy(f: impl Fn(&[f64]) -> u8, x: &[Vec<f64>], y: &[u8]) -> f64 {
        x.iter().zip(y).filter(|(r, &l)| f(r) == l).count() as f64 / y.len() as f64
    }

    #[test]
    fn separable_training_accuracy() {
        let (x, y) = separable();
        let cfg = ForestConfig {
            n_trees: 10,
            ..Default::default()
        };
        let f = train_forest(&x, &y, &cfg).unwrap();
        assert_eq!(accuracy(|r| f.predict(r).unwrap(), &x, &y), 1.0);
    }

    #[test]
    fn single_class_is_constant() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, -(i as f64)]).collect();
        let y = vec![1u8; 6];
        let f = train_forest(&x, &y, &ForestConfig::default()).unwrap();
        for r in &x {
            assert_eq!(f.predict_proba(r).unwrap(), 1.0);
        }
        assert_eq!(f.predict_proba(&[100.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn deterministic_under_seed() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos(), i as f64]).collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from((i * 7) % 5 < 2)).collect();
        let cfg = ForestConfig {
            n_trees: 7,
            seed: 4,
            ..Default::default()
        };
        assert_eq!(train_forest(&x, &y, &cfg).unwrap(), train_forest(&x, &y, &cfg).unwrap());
        let other = ForestConfig { seed: 5, ..cfg };
        assert_ne!(train_forest(&x, &y, &cfg).unwrap(), train_forest(&x, &y, &other).unwrap());
    }

    #[test]
    fn vote_fractions_and_stump() {
        let leaf = |p| DecisionTree {
            nodes: vec![Node::Leaf { p }],
        };
        let f = RandomForest {
            trees: (0..10).map(|i| leaf(if i < 3 { 1.0 } else { 0.0 })).collect(),
            n_features: 1,
        };
        assert!((f.predict_proba(&[0.0]).unwrap() - 0.3).abs() < 1e-15);
        let stump = DecisionTree {
            nodes: vec![
                Node::Split {
                    feature: 0,
                    threshold: 1.5,
                    left: 1,
                    right: 2,
                },
                Node::Leaf { p: 0.25 },
                Node::Leaf { p: 0.8 },
            ],
        };
        let one = RandomForest {
            trees: vec![stump],
            n_features: 1,
        };
        assert_eq!(one.predict_proba(&[1.5]).unwrap(), 0.25);
        assert_eq!(one.predict_proba(&[1.6]).unwrap(), 0.8);
        assert!(one.predict_proba(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn hand_stump_from_data() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let y = vec![0, 0, 1, 1];
        let cfg = ForestConfig {
            max_depth: Some(1),
            ..Default::default()
        };
        let t = train_tree(&x, &y, &cfg).unwrap();
        assert_eq!(
            t.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 1.5,
                left: 1,
                right: 2
            }
        );
    }

    #[test]
    fn container_round_trip() {
        let (x, y) = separable();
        let f = train_forest(
            &x,
            &y,
            &ForestConfig {
                n_trees: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let bytes = f.to_container().to_bytes().unwrap();
        let back = RandomForest::from_container(&Container::from_bytes(&bytes).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
