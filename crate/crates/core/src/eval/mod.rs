//! Evaluation protocol: splits, oversampling, metrics, the eight-method
//! comparison, inference on unrated sessions and the agreement / bias
//! statistics.

pub mod bias;
pub mod classify;
pub mod distance;
pub mod experiment;
pub mod metrics;
pub mod split;
pub mod stats;

pub use bias::{bias_report, infer_unlabeled, read_calls, write_calls, BiasReport, Call};
pub use classify::{NeuralClassifier, NgramClassifier, SessionClassifier, ValenceClassifier};
pub use distance::{rating_distance_analysis, RatingDistances, DEFAULT_SAMPLE_FRACTION};
pub use experiment::{
    evaluate, parse_methods, run_experiment, train_methods, EvalReport, ExperimentConfig, Method, MethodResult,
    TrainedModel, TrainedSet,
};
pub use metrics::{compute_metrics, threshold_calls, Metrics};
pub use split::{make_split, oversample_balance, Split};
pub use stats::{chi_squared_2x2, chi_squared_sf, cohen_kappa, fleiss_kappa};
