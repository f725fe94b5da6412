use chatsat::eval::{run_experiment, ExperimentConfig, Method};
use chatsat::nnet::{loss, train, CellType, ModelConfig, Params};
use chatsat::preprocess::{TokenSequence, FIRST_WORD_ID};
use chatsat::synthcorpus::{generate, GenSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: u32 = 10;

/// Label = parity of the first token id; the other seven are noise.
fn parity_set(n: usize, seed: u64) -> Vec<TokenSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let ids: Vec<u32> = (0..8).map(|_| FIRST_WORD_ID + rng.gen_range(0..WORDS)).collect();
            TokenSequence::from_stream(&ids, 8, Some((ids[0] % 2) as u8))
        })
        .collect()
}

#[test]
fn parity_toy_problem_is_learned() {
    let data = parity_set(200, 1);
    let val = parity_set(50, 2);
    for cell in [CellType::Lstm, CellType::Gru] {
        let mut cfg = ModelConfig::new(cell, false, (FIRST_WORD_ID + WORDS) as usize);
        cfg.embed_dim = 8;
        cfg.hidden_dim = 16;
        cfg.max_len = 8;
        cfg.dropout_rate = 0.0;
        cfg.learning_rate = 0.01;
        cfg.max_epochs = 30;
        cfg.patience = 0;
        cfg.rng_seed = 3;
        let initial = loss(&cfg, &Params::init(&cfg, cfg.rng_seed), &data).unwrap();
        let ckpt = train(&cfg, &data, &val).unwrap();
        assert_eq!(ckpt.history.len(), 30);
        let last = ckpt.history.last().unwrap().train_loss;
        assert!(last < 0.1 * initial, "{cell}: {initial} -> {last}");
    }
}

#[test]
fn time_tokens_carry_the_temporal_signal() {
    let mut model = ModelConfig::new(CellType::Lstm, false, 1);
    model.embed_dim = 8;
    model.hidden_dim = 16;
    model.max_len = 200;
    model.learning_rate = 0.005;
    model.max_epochs = 15;
    model.patience = 3;
    let (mut timed, mut plain) = (Vec::new(), Vec::new());
    for seed in 0..5 {
        let (corpus, _) = generate(&GenSpec {
            n_sessions: 800,
            labeled_fraction: 1.0,
            lexical_signal_strength: 0.0,
            temporal_signal_strength: 1.0,
            rng_seed: seed,
            ..GenSpec::default()
        })
        .unwrap();
        let cfg = ExperimentConfig {
            seed,
            model: model.clone(),
            methods: vec![Method::ALL[3], Method::ALL[6]],
            ..ExperimentConfig::default()
        };
        let (_, report) = run_experiment(&corpus, &cfg).unwrap();
        plain.push(report.get(Method::ALL[3]).unwrap().f1);
        timed.push(report.get(Method::ALL[6]).unwrap().f1);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    // Chance level for 20% prevalence is at most 2p/(1+p) = 0.33.
    assert!(mean(&timed) > 0.7, "LSTM-Time F1 {timed:?}");
    assert!(mean(&plain) < 0.45, "LSTM F1 {plain:?}");
}
