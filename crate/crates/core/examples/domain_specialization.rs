//! Accuracy on sub-corpora of increasing specialization: the more specific
//! the domain, the fewer and more homogeneous the candidates.
//!
//!     cargo run --release --example domain_specialization

use std::path::Path;

use jobrec::corpus::{level, LEVEL_DOMAINS};
use jobrec::{run_experiment, ExperimentConfig};

fn main() -> jobrec::Result<()> {
    let base = ExperimentConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cohort.conf"))?;
    println!("{:<24} level  proposals  precision  recall", "domain");
    for domain in LEVEL_DOMAINS {
        let mut cfg = base.clone();
        cfg.domain_filter = Some(domain.to_string());
        cfg.n_users = 20;
        cfg.n_queries = 10;
        let size = cfg.load_store()?.len();
        let out = run_experiment(&cfg)?;
        let n = out.series.len() as f64;
        let precision = out.series.avg_precision.iter().sum::<f64>() / n;
        let recall = out.series.avg_recall.iter().sum::<f64>() / n;
        println!(
            "{domain:<24} {:>5}  {size:>9}  {precision:>9.3}  {recall:>6.3}",
            level(domain).unwrap_or(0)
        );
    }
    Ok(())
}
