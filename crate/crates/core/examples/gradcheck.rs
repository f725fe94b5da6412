//! Finite-difference gradient check for the three recurrent cells.

use chatsat::nnet::gradcheck::{gradient_check, random_batch, DEFAULT_EPSILON, TOLERANCE};
use chatsat::nnet::{CellType, ModelConfig};

fn main() -> chatsat::Result<()> {
    for cell in CellType::ALL {
        let mut cfg = ModelConfig::new(cell, true, 20);
        cfg.embed_dim = 5;
        cfg.hidden_dim = 8;
        cfg.max_len = 12;
        let batch = random_batch(&cfg, 4, 7);
        let r = gradient_check(&cfg, &batch, DEFAULT_EPSILON)?;
        println!("{cell}: {} entries, max {:.2e} at {}", r.checked, r.max_rel_error, r.worst);
        for (name, e) in &r.per_param {
            println!("  {name:<10} {e:.2e}");
        }
        assert!(r.passed(TOLERANCE));
    }
    Ok(())
}
