//! Candidate retrieval: keyword and constraint filtering, interest scoring
//! and ranking.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::model::{relevance, Constraint, ConstraintCheck, JobProposal, Topic, UserProfile};
use crate::store::ProposalStore;

/// A proposal paired with its interest degree for one user.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredProposal {
    pub proposal: JobProposal,
    pub score: f64,
}

/// Scored proposals, best first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateList {
    pub entries: Vec<ScoredProposal>,
}

impl CandidateList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn jids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.proposal.jid.as_str())
    }

    pub fn get(&self, jid: &str) -> Option<&ScoredProposal> {
        self.entries.iter().find(|e| e.proposal.jid == jid)
    }
}

/// Proposals sharing at least one topic with the query, in store order.
pub fn keyword_filter<'a>(store: &'a ProposalStore, q_topics: &BTreeSet<Topic>) -> Vec<&'a JobProposal> {
    store
        .iter()
        .filter(|p| !p.topics.is_disjoint(q_topics))
        .collect()
}

/// Why proposals were dropped by [`constraint_filter`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterDiagnostics {
    pub violated: usize,
    pub missing_feature: usize,
    pub type_mismatch: usize,
}

/// Keeps proposals satisfying every constraint. A proposal lacking a
/// constrained feature, or carrying it with the wrong type, fails.
pub fn constraint_filter<'a>(
    candidates: impl IntoIterator<Item = &'a JobProposal>,
    constraints: &[Constraint],
) -> (Vec<&'a JobProposal>, FilterDiagnostics) {
    let mut diag = FilterDiagnostics::default();
    let kept = candidates
        .into_iter()
        .filter(|p| {
            let mut ok = true;
            for c in constraints {
                match c.check(p) {
                    ConstraintCheck::Satisfied => continue,
                    ConstraintCheck::Violated => diag.violated += 1,
                    ConstraintCheck::Missing => diag.missing_feature += 1,
                    ConstraintCheck::TypeMismatch => diag.type_mismatch += 1,
                }
                ok = false;
            }
            ok
        })
        .collect();
    (kept, diag)
}

/// Sum of the relevances of the profile topics the proposal mentions.
pub fn interest_degree(proposal: &JobProposal, profile: &UserProfile) -> f64 {
    proposal
        .topics
        .iter()
        .filter_map(|t| profile.topics.get(t))
        .map(|t| relevance(t, profile.clock))
        .sum()
}

/// Scores and sorts candidates by descending interest, ties by ascending JID.
pub fn rank<'a>(
    candidates: impl IntoIterator<Item = &'a JobProposal>,
    profile: &UserProfile,
) -> CandidateList {
    let mut entries: Vec<ScoredProposal> = candidates
        .into_iter()
        .map(|p| ScoredProposal {
            score: interest_degree(p, profile),
            proposal: p.clone(),
        })
        .collect();
    entries.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.proposal.jid.cmp(&b.proposal.jid))
    });
    entries.dedup_by(|a, b| a.proposal.jid == b.proposal.jid);
    CandidateList { entries }
}
