pub mod baselines;
pub mod chatlog;
pub mod cli;
pub mod container;
pub mod error;
pub mod eval;
pub mod ngram;
pub mod nnet;
pub mod preprocess;
pub mod stem;
pub mod synthcorpus;
pub mod valence;

pub use error::{Error, Result};
