//! Classical models behind the two non-neural baselines: a random forest on
//! affect features and L1 logistic regression on n-gram counts.

pub mod forest;
pub mod logreg;

pub use forest::{train_forest, train_tree, DecisionTree, ForestConfig, Node, RandomForest};
pub use logreg::{objective as l1_objective, train_l1_logreg, train_l1_logreg_traced, L1Config, L1LogReg};
