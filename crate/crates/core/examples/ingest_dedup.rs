//! Merging proposal files into one database: duplicates by JID are skipped,
//! malformed entries are reported, and `upsert` replaces changed entries.
//!
//!     cargo run --example ingest_dedup

use std::path::Path;

use jobrec::store::load_xml;
use jobrec::xml::parse_jpd;
use jobrec::ProposalStore;

const BATCH: &str = r#"<JPD>
  <JobProposal JID="J1" JURL="http://jobs.example.org/1">
    <JTopicSet><Topic name="Java"/><Topic name="XML"/></JTopicSet>
    <JCharacteristicSet>
      <Characteristic feature="salary" type="number" value="35000" unit="EUR"/>
    </JCharacteristicSet>
  </JobProposal>
  <JobProposal JID="J9" JURL="http://jobs.example.org/9">
    <JCharacteristicSet/>
  </JobProposal>
  <JobProposal JID="J3" JURL="http://jobs.example.org/3">
    <JTopicSet><Topic name="nurse"/></JTopicSet>
  </JobProposal>
</JPD>"#;

fn main() -> jobrec::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut store = ProposalStore::new();

    let first = load_xml(&data.join("two_jpd.xml"))?;
    let report = store.ingest(first.proposals.clone());
    println!("first load: {report:?}");

    let again = store.ingest(first.proposals);
    println!("same file again: inserted {}, duplicates {}", again.inserted, again.duplicates);

    let batch = parse_jpd(BATCH, Path::new("batch.xml"))?;
    for r in &batch.rejects {
        println!("rejected element {} (line {}): {}", r.index, r.line, r.reason);
    }
    let plain = store.clone().ingest(batch.proposals.clone());
    println!("batch without upsert: {plain:?}");
    let upsert = store.ingest_with(batch.proposals, true);
    println!("batch with upsert: {upsert:?}");

    println!("store now holds {}", store.jids().collect::<Vec<_>>().join(", "));
    print!("{}", store.to_xml());
    Ok(())
}
