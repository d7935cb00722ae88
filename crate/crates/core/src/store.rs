//! The job proposal database: deduplicating ingestion and XML persistence.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use crate::error::Result;
use crate::model::{JobProposal, Topic};
use crate::xml::{self, XmlLoad};

/// Proposals keyed by JID, iterated in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProposalStore {
    proposals: IndexMap<String, JobProposal>,
}

/// A batch element that could not be ingested.
#[derive(Clone, Debug, PartialEq)]
pub struct IngestReject {
    pub index: usize,
    pub jid: String,
    pub reason: String,
}

/// Two proposals with identical topic sets under different JIDs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearDuplicate {
    pub jid: String,
    pub existing: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IngestReport {
    pub inserted: usize,
    /// Existing proposals replaced in place (only with `upsert`).
    pub updated: usize,
    pub duplicates: usize,
    pub rejects: Vec<IngestReject>,
    /// Warnings only; these proposals are still inserted.
    pub near_duplicates: Vec<NearDuplicate>,
}

impl ProposalStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    pub fn get(&self, jid: &str) -> Option<&JobProposal> {
        self.proposals.get(jid)
    }

    pub fn contains(&self, jid: &str) -> bool {
        self.proposals.contains_key(jid)
    }

    pub fn iter(&self) -> impl Iterator<Item = &JobProposal> {
        self.proposals.values()
    }

    pub fn jids(&self) -> impl Iterator<Item = &str> {
        self.proposals.keys().map(String::as_str)
    }

    /// Inserts proposals whose JID is not yet stored; duplicates are skipped.
    pub fn ingest(&mut self, batch: impl IntoIterator<Item = JobProposal>) -> IngestReport {
        self.ingest_with(batch, false)
    }

    /// Like [`ingest`](Self::ingest), but with `upsert` an already stored JID
    /// is replaced in place when its content differs.
    pub fn ingest_with(
        &mut self,
        batch: impl IntoIterator<Item = JobProposal>,
        upsert: bool,
    ) -> IngestReport {
        let mut report = IngestReport::default();
        for (index, proposal) in batch.into_iter().enumerate() {
            if let Err(e) = proposal.validate() {
                report.rejects.push(IngestReject {
                    index,
                    jid: proposal.jid.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
            if let Some(slot) = self.proposals.get_mut(&proposal.jid) {
                if upsert && *slot != proposal {
                    *slot = proposal;
                    report.updated += 1;
                } else {
                    report.duplicates += 1;
                }
                continue;
            }
            if let Some(existing) = self.find_same_topics(&proposal.topics) {
                report.near_duplicates.push(NearDuplicate {
                    jid: proposal.jid.clone(),
                    existing: existing.to_string(),
                });
            }
            self.proposals.insert(proposal.jid.clone(), proposal);
            report.inserted += 1;
        }
        report
    }

    fn find_same_topics(&self, topics: &BTreeSet<Topic>) -> Option<&str> {
        self.proposals
            .values()
            .find(|p| &p.topics == topics)
            .map(|p| p.jid.as_str())
    }

    /// Keeps only proposals tagged with `topic`.
    pub fn restrict_to_topic(&self, topic: &str) -> ProposalStore {
        let topic = crate::model::normalize_name(topic);
        ProposalStore {
            proposals: self
                .proposals
                .iter()
                .filter(|(_, p)| p.has_topic(&topic))
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
        }
    }

    pub fn to_xml(&self) -> String {
        xml::write_jpd(self.iter())
    }

    pub fn save_xml(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_xml())?;
        Ok(())
    }

    /// Loads a document straight into a fresh store.
    pub fn from_xml_file(path: &Path) -> Result<(ProposalStore, XmlLoad, IngestReport)> {
        let load = load_xml(path)?;
        let mut store = ProposalStore::new();
        let report = store.ingest(load.proposals.iter().cloned());
        Ok((store, load, report))
    }
}

impl FromIterator<JobProposal> for ProposalStore {
    fn from_iter<I: IntoIterator<Item = JobProposal>>(iter: I) -> Self {
        let mut store = ProposalStore::new();
        store.ingest(iter);
        store
    }
}

/// Reads proposals in document order; see [`xml::parse_jpd`].
pub fn load_xml(path: &Path) -> Result<XmlLoad> {
    xml::load_jpd(path)
}
