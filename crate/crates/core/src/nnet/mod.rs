//! Recurrent sequence classifiers trained from scratch: embedding, tanh
//! RNN / LSTM / GRU cell, logistic output on the last hidden state,
//! cross-entropy with an output-layer L2 penalty, BPTT, Adam and early
//! stopping.

pub mod adam;
pub mod cell;
pub mod checkpoint;
pub mod config;
pub mod gradcheck;
pub mod model;
pub mod params;
pub mod tensor;
pub mod train;

pub use adam::{adam_step, adam_update, AdamState};
pub use cell::{cell_step, CellState};
pub use checkpoint::{Fingerprints, ModelCheckpoint};
pub use config::{CellType, ModelConfig};
pub use gradcheck::{compare_gradients, gradient_check, random_batch, random_params, GradCheckReport};
pub use model::{dropout_mask, forward, gradients, loss, loss_and_gradients, predict_proba};
pub use params::Params;
pub use tensor::Tensor2;
pub use train::{train, EarlyStopping, EpochRecord};
