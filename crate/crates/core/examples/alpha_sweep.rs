//! Satisfaction of the shipped cohort as a function of a fixed audacity,
//! next to the three adaptive strategies.
//!
//!     cargo run --release --example alpha_sweep

use std::path::Path;

use jobrec::simulation::run_with_store;
use jobrec::{AudacityStrategy, ExperimentConfig, StrategyKind};

fn main() -> jobrec::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cohort.conf");
    let base = ExperimentConfig::load(&path)?;
    let store = base.load_store()?;

    println!("alpha  mean_sigma  mean_list_len");
    for step in 0..=10 {
        let alpha = step as f64 / 10.0;
        let mut cfg = base.clone();
        cfg.strategy.manual_override = Some(alpha);
        let out = run_with_store(&cfg, &store)?;
        let eps: Vec<_> = out.episodes.iter().flatten().collect();
        let len = eps.iter().map(|e| e.final_list_size as f64).sum::<f64>() / eps.len() as f64;
        println!("{alpha:>5.1}  {:>10.4}  {len:>13.2}", out.mean_sigma(1, cfg.n_queries));
    }

    println!();
    println!("strategy  sigma q1-9  sigma q15-25");
    for kind in [StrategyKind::Pnf, StrategyKind::Lse2, StrategyKind::Ws] {
        let mut cfg = base.clone();
        cfg.strategy = AudacityStrategy::of_kind(kind);
        let out = run_with_store(&cfg, &store)?;
        println!("{:<8}  {:>10.4}  {:>12.4}", kind.to_string(), out.mean_sigma(1, 9), out.mean_sigma(15, 25));
    }
    Ok(())
}
