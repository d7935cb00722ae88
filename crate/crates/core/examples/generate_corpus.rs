//! Regenerates the shipped proposal databases from the built-in taxonomy.
//!
//!     cargo run --example generate_corpus -- crates/core/data

use std::path::PathBuf;

use jobrec::corpus::{demo_corpus, fixture_corpus};
use jobrec::xml::write_jpd;

fn main() -> jobrec::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir)?;

    let demo = demo_corpus();
    std::fs::write(dir.join("demo_jpd.xml"), write_jpd(&demo))?;
    let fixture = fixture_corpus();
    std::fs::write(dir.join("fixture_jpd.xml"), write_jpd(&fixture))?;

    println!("{} demo and {} fixture proposals written to {}", demo.len(), fixture.len(), dir.display());
    Ok(())
}
