//! Content-based job recommendation with feedback-adaptive result lists.
//!
//! A [`UserProfile`] counts the topics a user asks about and lets them decay
//! with age. For each [`Query`] the engine keeps proposals that share a
//! topic with the query and satisfy the user's constraints, ranks them by the
//! summed relevance of the profile topics they mention, takes the top
//! fraction as seeds and adds every other candidate whose topic set is close
//! enough to a seed. "Close enough" is the audacity, chosen per query by one
//! of the [`audacity`] strategies from the user's past satisfaction.
//!
//! ```
//! use std::collections::BTreeSet;
//! use jobrec::{complete_query, run_query, AudacityStrategy, EngineConfig, JobProposal,
//!              ProposalStore, Query, UserProfile};
//!
//! let store: ProposalStore = [
//!     JobProposal::new("J1", "https://jobs.example.org/J1", ["java", "xml"]).unwrap(),
//!     JobProposal::new("J2", "https://jobs.example.org/J2", ["java", "spring"]).unwrap(),
//!     JobProposal::new("J3", "https://jobs.example.org/J3", ["nurse"]).unwrap(),
//! ]
//! .into_iter()
//! .collect();
//!
//! let mut profile = UserProfile::new("ada");
//! let query = Query::new(0.5, ["java"], profile.next_query_index()).unwrap();
//! let result = run_query(&mut profile, &query, &store, &AudacityStrategy::default()).unwrap();
//! assert_eq!(result.alpha_used, 0.55);
//!
//! let accepted: BTreeSet<String> = ["J1".to_string()].into();
//! complete_query(&mut profile, &result, &accepted, &EngineConfig::default()).unwrap();
//! assert_eq!(profile.past_queries.len(), 1);
//! ```
//!
//! The `examples/` directory has one runnable program per capability.

pub mod audacity;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod model;
pub mod recommender;
pub mod retrieval;
pub mod simulation;
pub mod store;
pub mod xml;

pub use audacity::{
    compute_alpha, fit_parabola, gamma_decaying, lse2_alpha, maximize_on_unit_interval, pnf_alpha,
    ws_alpha, AudacityStrategy, GammaSchedule, ParabolaFit, StrategyKind,
};
pub use error::{Error, Result};
pub use evaluation::{
    cohort_averages, newell_distance, newell_from_orders, normalize_newell, precision_recall,
    CohortSeries, QueryEvaluation,
};
pub use model::{
    jaccard_similarity, relevance, satisfaction, CharValue, Constraint, ConstraintKind,
    JobProposal, PastQuery, ProfileTopic, Query, Topic, UserProfile,
};
pub use recommender::{
    complete_query, dissimilarity, expand, run_query, select_seeds, EngineConfig,
    RecommendationResult,
};
pub use retrieval::{constraint_filter, interest_degree, keyword_filter, rank, CandidateList, ScoredProposal};
pub use simulation::{run_experiment, user_decide, EpisodeRecord, ExperimentConfig, SyntheticUser};
pub use store::ProposalStore;
