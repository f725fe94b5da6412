use std::fmt;
use std::str::FromStr;

use crate::container::parse_key_values;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellType {
    TanhRnn,
    Lstm,
    Gru,
}

impl CellType {
    pub const ALL: [CellType; 3] = [CellType::TanhRnn, CellType::Lstm, CellType::Gru];

    /// Number of fused gate blocks in the input and recurrent weights.
    pub fn gates(self) -> usize {
        match self {
            CellType::TanhRnn => 1,
            CellType::Lstm => 4,
            CellType::Gru => 3,
        }
    }

    /// Gate block names in storage order.
    pub fn gate_names(self) -> &'static [&'static str] {
        match self {
            CellType::TanhRnn => &["hidden"],
            CellType::Lstm => &["input", "forget", "output", "candidate"],
            CellType::Gru => &["update", "reset", "candidate"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CellType::TanhRnn => "tanh_rnn",
            CellType::Lstm => "lstm",
            CellType::Gru => "gru",
        }
    }

    /// Display name used in report rows, e.g. `LSTM` or `GRU-Time`.
    pub fn method_name(self, include_time: bool) -> String {
        let base = match self {
            CellType::TanhRnn => "RNN",
            CellType::Lstm => "LSTM",
            CellType::Gru => "GRU",
        };
        if include_time {
            format!("{base}-Time")
        } else {
            base.to_string()
        }
    }
}

impl fmt::Display for CellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CellType {
    type Err = Error;

    fn from_str(s: &str) -> Result<CellType> {
        match s.to_ascii_lowercase().as_str() {
            "tanh_rnn" | "rnn" => Ok(CellType::TanhRnn),
            "lstm" => Ok(CellType::Lstm),
            "gru" => Ok(CellType::Gru),
            other => Err(Error::Config(format!("unknown cell type {other:?} (tanh_rnn, lstm, gru)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub cell: CellType,
    pub include_time: bool,
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    /// Unrolled sequence length; inputs are padded or truncated to it.
    pub max_len: usize,
    pub dropout_rate: f64,
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub min_delta: f64,
    pub rng_seed: u64,
}

impl ModelConfig {
    pub fn new(cell: CellType, include_time: bool, vocab_size: usize) -> ModelConfig {
        ModelConfig {
            cell,
            include_time,
            vocab_size,
            embed_dim: 50,
            hidden_dim: 64,
            max_len: 500,
            dropout_rate: 0.2,
            l2_lambda: 0.001,
            learning_rate: 0.001,
            batch_size: 32,
            max_epochs: 100,
            patience: 5,
            min_delta: 1e-4,
            rng_seed: 0,
        }
    }

    pub fn method_name(&self) -> String {
        self.cell.method_name(self.include_time)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("vocab_size", self.vocab_size),
            ("embed_dim", self.embed_dim),
            ("hidden_dim", self.hidden_dim),
            ("max_len", self.max_len),
            ("batch_size", self.batch_size),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!("dropout_rate {} outside [0, 1)", self.dropout_rate)));
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::Config(format!("l2_lambda {} must be >= 0", self.l2_lambda)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate {} must be > 0", self.learning_rate)));
        }
        if !(self.min_delta >= 0.0) {
            return Err(Error::Config("min_delta must be >= 0".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!(
            "cell = {}\ninclude_time = {}\nvocab_size = {}\nembed_dim = {}\nhidden_dim = {}\nmax_len = {}\n\
             dropout_rate = {}\nl2_lambda = {}\nlearning_rate = {}\nbatch_size = {}\nmax_epochs = {}\n\
             patience = {}\nmin_delta = {}\nrng_seed = {}\n",
            self.cell,
            self.include_time,
            self.vocab_size,
            self.embed_dim,
            self.hidden_dim,
            self.max_len,
            self.dropout_rate,
            self.l2_lambda,
            self.learning_rate,
            self.batch_size,
            self.max_epochs,
            self.patience,
            self.min_delta,
            self.rng_seed
        )
    }

    pub fn parse(text: &str) -> Result<ModelConfig> {
        let map = parse_key_values(text)?;
        let mut cfg = ModelConfig::new(CellType::Lstm, false, 1);
        for key in KEYS {
            let v = map.get(key).ok_or_else(|| Error::Format(format!("model config: missing {key}")))?;
            cfg.set(key, v).map_err(|e| Error::Format(format!("model config: {e}")))?;
        }
        if map.len() != KEYS.len() {
            return Err(Error::Format("model config: unexpected keys".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its text form; unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| Error::Config(format!("bad value for {k}: {v:?}")))
        }
        match key {
            "cell" => self.cell = value.trim().parse()?,
            "include_time" => self.include_time = num(key, value)?,
            "vocab_size" => self.vocab_size = num(key, value)?,
            "embed_dim" => self.embed_dim = num(key, value)?,
            "hidden_dim" => self.hidden_dim = num(key, value)?,
            "max_len" => self.max_len = num(key, value)?,
            "dropout_rate" => self.dropout_rate = num(key, value)?,
            "l2_lambda" => self.l2_lambda = num(key, value)?,
            "learning_rate" => self.learning_rate = num(key, value)?,
            "batch_size" => self.batch_size = num(key, value)?,
            "max_epochs" => self.max_epochs = num(key, value)?,
            "patience" => self.patience = num(key, value)?,
            "min_delta" => self.min_delta = num(key, value)?,
            "rng_seed" => self.rng_seed = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown model key {key:?}"))),
        }
        Ok(())
    }
}

/// Keys of the text form, in output order.
pub const KEYS: [&str; 14] = [
    "cell",
    "include_time",
    "vocab_size",
    "embed_dim",
    "hidden_dim",
    "max_len",
    "dropout_rate",
    "l2_lambda",
    "learning_rate",
    "batch_size",
    "max_epochs",
    "patience",
    "min_delta",
    "rng_seed",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = ModelConfig::new(CellType::Gru, true, 1234);
        cfg.learning_rate = 0.0025;
        cfg.rng_seed = 99;
        assert_eq!(ModelConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn validation() {
        let mut cfg = ModelConfig::new(CellType::Lstm, false, 10);
        assert!(cfg.validate().is_ok());
        cfg.dropout_rate = 1.0;
        assert!(cfg.validate().is_err());
        cfg.dropout_rate = 0.0;
        cfg.hidden_dim = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn names() {
        assert_eq!(CellType::Lstm.method_name(true), "LSTM-Time");
        assert_eq!(CellType::TanhRnn.method_name(false), "RNN");
        assert_eq!("rnn".parse::<CellType>().unwrap(), CellType::TanhRnn);
    }
}
