//! Runs the shipped cohort under each strategy and writes the CSV series.
//!
//!     cargo run --release --example simulate_strategies -- /tmp/jobrec-out

use std::path::{Path, PathBuf};

use jobrec::simulation::run_with_store;
use jobrec::{AudacityStrategy, ExperimentConfig, StrategyKind};

fn main() -> jobrec::Result<()> {
    let out_root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("jobrec-sim"));
    let base = ExperimentConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cohort.conf"))?;
    let store = base.load_store()?;

    for kind in [StrategyKind::Pnf, StrategyKind::Lse2, StrategyKind::Ws] {
        let mut cfg = base.clone();
        cfg.strategy = AudacityStrategy::of_kind(kind);
        let out = run_with_store(&cfg, &store)?;
        let dir = out_root.join(kind.to_string());
        out.write_csvs(&dir)?;

        let last = out.series.len() - 1;
        println!(
            "{:<6} sigma q1-9 {:.3}  q15-25 {:.3}  final precision {:.3}  recall {:.3}  norm newell {:.3}  -> {}",
            kind.to_string(),
            out.mean_sigma(1, 9),
            out.mean_sigma(15, 25),
            out.series.avg_precision[last],
            out.series.avg_recall[last],
            out.series.avg_norm_newell[last],
            dir.display()
        );
    }
    Ok(())
}
