//! The per-query recommendation cycle: seed selection, dissimilarity-based
//! expansion and feedback bookkeeping.

use std::collections::{BTreeSet, HashSet};

use crate::audacity::{compute_alpha, AudacityStrategy};
use crate::error::{invalid, Result};
use crate::model::{satisfaction, JobProposal, Query, Topic, UserProfile};
use crate::retrieval::{constraint_filter, keyword_filter, rank, CandidateList, FilterDiagnostics};
use crate::store::ProposalStore;

/// Engine-wide knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    /// Profile topics with relevance below this are pruned after each query.
    pub prune_threshold: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            prune_threshold: 0.05,
        }
    }
}

/// Output of [`run_query`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RecommendationResult {
    pub temp_list: CandidateList,
    pub seeds: Vec<String>,
    /// Recommended JIDs, in candidate rank order.
    pub final_list: Vec<String>,
    pub alpha_used: f64,
    pub diagnostics: FilterDiagnostics,
}

impl RecommendationResult {
    pub fn final_proposals(&self) -> Vec<&JobProposal> {
        self.final_list
            .iter()
            .filter_map(|j| self.temp_list.get(j).map(|e| &e.proposal))
            .collect()
    }
}

/// The first `ceil(sel_degree * n)` candidates.
pub fn select_seeds(temp_list: &CandidateList, sel_degree: f64) -> Vec<String> {
    let n = temp_list.len();
    let raw = sel_degree.clamp(0.0, 1.0) * n as f64;
    // absorb representation error, e.g. 0.3 * 10 = 3.0000000000000004
    let count = ((raw - 1e-9 * raw.max(1.0)).ceil().max(0.0) as usize).min(n);
    temp_list.jids().take(count).map(str::to_string).collect()
}

/// One minus Dice's coefficient of the two topic sets: 0 for identical
/// sets, 1 for disjoint ones.
pub fn topic_dissimilarity(a: &BTreeSet<Topic>, b: &BTreeSet<Topic>) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 0.0;
    }
    let shared = a.intersection(b).count();
    1.0 - (2 * shared) as f64 / total as f64
}

pub fn dissimilarity(a: &JobProposal, b: &JobProposal) -> f64 {
    topic_dissimilarity(&a.topics, &b.topics)
}

/// Seeds plus every candidate within dissimilarity `alpha` of some seed,
/// in candidate rank order.
pub fn expand(temp_list: &CandidateList, seeds: &[String], alpha: f64) -> Vec<String> {
    let seed_ids: HashSet<&str> = seeds.iter().map(String::as_str).collect();
    let anchors: Vec<&JobProposal> = temp_list
        .entries
        .iter()
        .filter(|e| seed_ids.contains(e.proposal.jid.as_str()))
        .map(|e| &e.proposal)
        .collect();
    temp_list
        .entries
        .iter()
        .filter(|e| {
            seed_ids.contains(e.proposal.jid.as_str())
                || anchors.iter().any(|s| dissimilarity(&e.proposal, s) <= alpha)
        })
        .map(|e| e.proposal.jid.clone())
        .collect()
}

/// Runs one query for `profile`: advances its clock, counts the query
/// topics, retrieves and ranks candidates, picks the audacity and builds the
/// final list. Feedback is recorded separately by [`complete_query`].
pub fn run_query(
    profile: &mut UserProfile,
    query: &Query,
    store: &ProposalStore,
    strategy: &AudacityStrategy,
) -> Result<RecommendationResult> {
    let expected = profile.next_query_index();
    if query.k != expected {
        return Err(invalid(format!(
            "query index {} does not follow history (expected {expected})",
            query.k
        )));
    }
    profile.clock += 1;
    profile.update_topic_set(query);

    let matched = keyword_filter(store, &query.topics);
    let (kept, diagnostics) = constraint_filter(matched, &profile.constraints);
    let temp_list = rank(kept, profile);

    let alpha_used = compute_alpha(&profile.past_queries, strategy, query.k);
    let seeds = select_seeds(&temp_list, query.sel_degree);
    let final_list = expand(&temp_list, &seeds, alpha_used);
    Ok(RecommendationResult {
        temp_list,
        seeds,
        final_list,
        alpha_used,
        diagnostics,
    })
}

/// Records the user's verdict on `result` and prunes the profile.
///
/// Returns the satisfaction, or `None` when nothing was recommended (in
/// which case the history is left untouched).
pub fn complete_query(
    profile: &mut UserProfile,
    result: &RecommendationResult,
    accepted: &BTreeSet<String>,
    config: &EngineConfig,
) -> Result<Option<f64>> {
    let offered: HashSet<&str> = result.final_list.iter().map(String::as_str).collect();
    if let Some(stray) = accepted.iter().find(|j| !offered.contains(j.as_str())) {
        return Err(invalid(format!("accepted {stray} was not recommended")));
    }
    let sigma = if result.final_list.is_empty() {
        None
    } else {
        let sigma = satisfaction(result.final_list.len(), accepted.len())?;
        profile.record_feedback(sigma, result.alpha_used)?;
        Some(sigma)
    };
    profile.prune_topics(config.prune_threshold);
    Ok(sigma)
}
