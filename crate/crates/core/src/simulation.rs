//! Synthetic-user experiments.
//!
//! Each simulated user has hidden per-topic interest weights. It issues
//! queries drawn from those weights, accepts proposals whose mean interest
//! clears a threshold (minus a fatigue penalty that grows along the list),
//! and feeds its verdict back to the engine. Every run is reproducible from
//! its seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audacity::AudacityStrategy;
use crate::corpus;
use crate::error::{invalid, Error, Result};
use crate::evaluation::{cohort_averages, newell_from_orders, precision_recall, CohortSeries, QueryEvaluation};
use crate::model::{check_unit, JobProposal, Query, Topic, UserProfile};
use crate::recommender::{complete_query, run_query, EngineConfig, RecommendationResult};
use crate::store::ProposalStore;
use crate::xml::write_profile;

/// Slack used when comparing a utility against the acceptance threshold.
const DECISION_EPS: f64 = 1e-9;

/// How a user picks the topics of a query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueryWeighting {
    /// Proportionally to hidden interest.
    #[default]
    Interest,
    /// Uniformly among topics with positive interest.
    Uniform,
}

impl std::str::FromStr for QueryWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interest" => Ok(QueryWeighting::Interest),
            "uniform" => Ok(QueryWeighting::Uniform),
            other => Err(invalid(format!("unknown query weighting `{other}`"))),
        }
    }
}

/// A simulated job seeker.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticUser {
    pub uid: String,
    /// Hidden interest in each topic, in `[0, 1]`; unknown topics count as 0.
    pub hidden_interest: BTreeMap<Topic, f64>,
    pub acceptance_threshold: f64,
    /// Utility lost per item preceding a proposal in the list.
    pub fatigue: f64,
    /// Inclusive bounds on how many topics a query carries.
    pub topics_per_query: (usize, usize),
    pub query_weighting: QueryWeighting,
    pub seed: u64,
}

impl SyntheticUser {
    pub fn new(uid: &str, hidden_interest: BTreeMap<Topic, f64>, acceptance_threshold: f64, fatigue: f64, seed: u64) -> Result<Self> {
        if hidden_interest.is_empty() {
            return Err(invalid(format!("user {uid} has no interests")));
        }
        for w in hidden_interest.values() {
            check_unit("interest weight", *w)?;
        }
        check_unit("acceptance_threshold", acceptance_threshold)?;
        if !(fatigue >= 0.0 && fatigue.is_finite()) {
            return Err(invalid("fatigue must be >= 0"));
        }
        Ok(SyntheticUser {
            uid: uid.to_string(),
            hidden_interest,
            acceptance_threshold,
            fatigue,
            topics_per_query: (1, 3),
            query_weighting: QueryWeighting::Interest,
            seed,
        })
    }

    /// Mean hidden interest over the proposal's topics.
    pub fn utility(&self, proposal: &JobProposal) -> f64 {
        let total: f64 = proposal
            .topics
            .iter()
            .map(|t| self.hidden_interest.get(t).copied().unwrap_or(0.0))
            .sum();
        total / proposal.topics.len() as f64
    }

    /// Samples query topics without replacement.
    pub fn sample_query_topics(&self, rng: &mut impl Rng) -> BTreeSet<Topic> {
        let (lo, hi) = self.topics_per_query;
        let mut pool: Vec<(&Topic, f64)> = self
            .hidden_interest
            .iter()
            .filter(|(_, &w)| w > 0.0)
            .map(|(t, &w)| match self.query_weighting {
                QueryWeighting::Interest => (t, w),
                QueryWeighting::Uniform => (t, 1.0),
            })
            .collect();
        if pool.is_empty() {
            pool = self.hidden_interest.iter().map(|(t, _)| (t, 1.0)).collect();
        }
        let want = rng.gen_range(lo.max(1)..=hi.max(lo).max(1)).min(pool.len());
        let mut picked = BTreeSet::new();
        for _ in 0..want {
            let (i, _) = *pool
                .iter()
                .enumerate()
                .collect::<Vec<_>>()
                .choose_weighted(rng, |(_, (_, w))| *w)
                .expect("pool is non-empty with positive weights");
            picked.insert(pool.remove(i).0.clone());
        }
        picked
    }
}

/// Proposals the user accepts from `list`: the item at 1-based position `p`
/// is accepted when `utility - fatigue * (p - 1) >= acceptance_threshold`.
pub fn user_decide(user: &SyntheticUser, list: &[String], proposals: &ProposalStore) -> BTreeSet<String> {
    list.iter()
        .enumerate()
        .filter(|(pos, jid)| {
            proposals.get(jid).is_some_and(|p| {
                user.utility(p) - user.fatigue * *pos as f64 >= user.acceptance_threshold - DECISION_EPS
            })
        })
        .map(|(_, jid)| jid.clone())
        .collect()
}

/// The user's own ordering of `items`: utility descending, JID ascending.
pub fn user_ranking(user: &SyntheticUser, items: &[&JobProposal]) -> Vec<String> {
    let mut scored: Vec<(f64, &str)> = items.iter().map(|p| (user.utility(p), p.jid.as_str())).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored.into_iter().map(|(_, j)| j.to_string()).collect()
}

/// Where the proposals come from.
#[derive(Clone, Debug, PartialEq)]
pub enum CorpusSource {
    /// The generated demo corpus.
    Demo,
    File(PathBuf),
}

/// Parameters of the synthetic cohort.
#[derive(Clone, Debug, PartialEq)]
pub struct CohortConfig {
    pub acceptance_threshold: f64,
    pub fatigue: f64,
    /// Interest range for the home leaf name and its skills.
    pub core_weight: (f64, f64),
    /// Interest range for the ancestors of the home leaf.
    pub ancestor_weight: (f64, f64),
    /// Interest range for skills of sibling leaves.
    pub sibling_weight: (f64, f64),
    pub query_weighting: QueryWeighting,
}

impl Default for CohortConfig {
    fn default() -> Self {
        CohortConfig {
            acceptance_threshold: 0.35,
            fatigue: 0.08,
            core_weight: (0.8, 1.0),
            ancestor_weight: (0.2, 0.4),
            sibling_weight: (0.3, 0.5),
            query_weighting: QueryWeighting::Interest,
        }
    }
}

/// One experiment: corpus, cohort, engine and strategy settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: CorpusSource,
    pub n_users: usize,
    pub n_queries: usize,
    pub strategy: AudacityStrategy,
    pub engine: EngineConfig,
    pub sel_degree: f64,
    pub seed: u64,
    /// Restricts proposals and user interests to one domain subtree.
    pub domain_filter: Option<String>,
    pub cohort: CohortConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus: CorpusSource::Demo,
            n_users: 50,
            n_queries: 25,
            strategy: AudacityStrategy::default(),
            engine: EngineConfig::default(),
            sel_degree: 0.4,
            seed: 7,
            domain_filter: None,
            cohort: CohortConfig::default(),
        }
    }
}

fn parse_range(key: &str, v: &str) -> Result<(f64, f64)> {
    let parts = v.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>();
    match parts.as_deref() {
        Ok([lo, hi]) if 0.0 <= *lo && lo <= hi && *hi <= 1.0 => Ok((*lo, *hi)),
        _ => Err(invalid(format!("{key}: expected `lo, hi` within [0, 1]"))),
    }
}

impl ExperimentConfig {
    /// Parses the flat `dotted.key = value` format. Relative corpus paths
    /// are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim(), base_dir).map_err(|e| Error::Config {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn set(&mut self, key: &str, value: &str, base_dir: &Path) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| invalid(format!("{key}: `{v}` is not a valid number")))
        }
        if self.strategy.set_key(key, value)? {
            return Ok(());
        }
        match key {
            "corpus.path" => {
                self.corpus = if value == "builtin:demo" {
                    CorpusSource::Demo
                } else {
                    CorpusSource::File(base_dir.join(value))
                }
            }
            "users.count" => self.n_users = num(key, value)?,
            "queries.count" => self.n_queries = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "engine.prune_threshold" => self.engine.prune_threshold = num(key, value)?,
            "engine.sel_degree" => self.sel_degree = num(key, value)?,
            "domain.filter" => {
                self.domain_filter = match value {
                    "" | "none" => None,
                    v => Some(v.to_string()),
                }
            }
            "cohort.acceptance_threshold" => self.cohort.acceptance_threshold = num(key, value)?,
            "cohort.fatigue" => self.cohort.fatigue = num(key, value)?,
            "cohort.core_weight" => self.cohort.core_weight = parse_range(key, value)?,
            "cohort.ancestor_weight" => self.cohort.ancestor_weight = parse_range(key, value)?,
            "cohort.sibling_weight" => self.cohort.sibling_weight = parse_range(key, value)?,
            "cohort.query_weighting" => self.cohort.query_weighting = value.parse()?,
            other => return Err(invalid(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_queries == 0 {
            return Err(invalid("users.count and queries.count must be >= 1"));
        }
        check_unit("engine.sel_degree", self.sel_degree)?;
        if !(self.engine.prune_threshold >= 0.0) {
            return Err(invalid("engine.prune_threshold must be >= 0"));
        }
        check_unit("cohort.acceptance_threshold", self.cohort.acceptance_threshold)?;
        if !(self.cohort.fatigue >= 0.0) {
            return Err(invalid("cohort.fatigue must be >= 0"));
        }
        if let Some(d) = &self.domain_filter {
            if corpus::subtree(d).is_empty() {
                return Err(invalid(format!("domain.filter: unknown domain `{d}`")));
            }
        }
        self.strategy.validate()
    }

    /// Loads the corpus and applies the domain filter.
    pub fn load_store(&self) -> Result<ProposalStore> {
        let store = match &self.corpus {
            CorpusSource::Demo => corpus::demo_corpus().into_iter().collect(),
            CorpusSource::File(path) => ProposalStore::from_xml_file(path)?.0,
        };
        Ok(match &self.domain_filter {
            None => store,
            Some(d) => {
                let names = corpus::subtree(d);
                store
                    .iter()
                    .filter(|p| p.topics.iter().any(|t| names.contains(t.as_str())))
                    .cloned()
                    .collect()
            }
        })
    }
}

fn per_user_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Builds the cohort: each user gets a home leaf domain, strong interest in
/// it and its skills, weaker interest in its ancestors and sibling skills.
pub fn generate_cohort(config: &ExperimentConfig) -> Result<Vec<SyntheticUser>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let leaves = corpus::leaves(config.domain_filter.as_deref());
    if leaves.is_empty() {
        return Err(invalid("no leaf domains to draw users from"));
    }
    let c = &config.cohort;
    let mut users = Vec::with_capacity(config.n_users);
    for i in 0..config.n_users {
        let home = leaves[i % leaves.len()];
        let mut interest = BTreeMap::new();
        let mut put = |name: &str, (lo, hi): (f64, f64), rng: &mut ChaCha8Rng| {
            let w = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            let t = Topic::new(name).expect("taxonomy names are non-empty");
            let slot = interest.entry(t).or_insert(0.0_f64);
            *slot = slot.max(w);
        };
        put(home.name, c.core_weight, &mut rng);
        for s in home.skills {
            put(s, c.core_weight, &mut rng);
        }
        for a in corpus::ancestors(home.name) {
            put(a, c.ancestor_weight, &mut rng);
        }
        let parent = corpus::ancestors(home.name).last().copied();
        for sib in corpus::leaves(None) {
            if sib.name != home.name && corpus::ancestors(sib.name).last().copied() == parent {
                for s in sib.skills {
                    put(s, c.sibling_weight, &mut rng);
                }
            }
        }
        let mut user = SyntheticUser::new(
            &format!("user{:03}", i + 1),
            interest,
            c.acceptance_threshold,
            c.fatigue,
            per_user_seed(config.seed, i),
        )?;
        user.query_weighting = c.query_weighting;
        users.push(user);
    }
    Ok(users)
}

/// One simulated query/feedback cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub uid: String,
    pub k: usize,
    /// `None` when nothing was recommended.
    pub sigma: Option<f64>,
    pub alpha: f64,
    pub precision: f64,
    pub recall: f64,
    pub newell: f64,
    /// Newell distance divided by the largest one in the run.
    pub norm_newell: f64,
    pub temp_list_size: usize,
    pub final_list_size: usize,
    pub accepted: usize,
    pub profile_bytes: usize,
}

/// Everything a run produces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub episodes: Vec<Vec<EpisodeRecord>>,
    pub series: CohortSeries,
    /// Mean serialized profile size after each query.
    pub profile_bytes: Vec<f64>,
    pub anomalies: Vec<String>,
}

/// Ranks the union of the recommendation and the user's picks two ways and
/// measures how far apart they are.
fn newell_for(user: &SyntheticUser, result: &RecommendationResult, user_list: &BTreeSet<String>) -> Result<f64> {
    let in_final: BTreeSet<&str> = result.final_list.iter().map(String::as_str).collect();
    let mut sys: Vec<String> = result.final_list.clone();
    sys.extend(
        result
            .temp_list
            .jids()
            .filter(|j| user_list.contains(*j) && !in_final.contains(j))
            .map(str::to_string),
    );
    if sys.is_empty() {
        return Ok(0.0);
    }
    let items: Vec<&JobProposal> = sys
        .iter()
        .filter_map(|j| result.temp_list.get(j).map(|e| &e.proposal))
        .collect();
    let usr = user_ranking(user, &items);
    newell_from_orders(&sys, &usr)
}

/// Runs one user through `n_queries` cycles.
pub fn run_user(
    user: &SyntheticUser,
    store: &ProposalStore,
    config: &ExperimentConfig,
    anomalies: &mut Vec<String>,
) -> Vec<EpisodeRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(user.seed);
    let mut profile = UserProfile::new(&user.uid);
    let mut out = Vec::with_capacity(config.n_queries);
    for step in 1..=config.n_queries {
        let topics = user.sample_query_topics(&mut rng);
        let episode = Query::new(config.sel_degree, topics.iter().map(Topic::as_str), profile.next_query_index())
            .and_then(|q| run_query(&mut profile, &q, store, &config.strategy))
            .and_then(|result| {
                let accepted = user_decide(user, &result.final_list, store);
                let sigma = complete_query(&mut profile, &result, &accepted, &config.engine)?;
                let temp: Vec<String> = result.temp_list.jids().map(str::to_string).collect();
                let user_list = user_decide(user, &temp, store);
                let recommended: BTreeSet<String> = result.final_list.iter().cloned().collect();
                let (precision, recall) = precision_recall(&recommended, &user_list);
                let newell = newell_for(user, &result, &user_list)?;
                Ok(EpisodeRecord {
                    uid: user.uid.clone(),
                    k: step,
                    sigma,
                    alpha: result.alpha_used,
                    precision,
                    recall,
                    newell,
                    norm_newell: 0.0,
                    temp_list_size: result.temp_list.len(),
                    final_list_size: result.final_list.len(),
                    accepted: accepted.len(),
                    profile_bytes: write_profile(&profile).len(),
                })
            });
        match episode {
            Ok(rec) => out.push(rec),
            Err(e) => {
                anomalies.push(format!("{} query {step}: {e}", user.uid));
                out.push(EpisodeRecord {
                    uid: user.uid.clone(),
                    k: step,
                    sigma: None,
                    alpha: 0.0,
                    precision: 0.0,
                    recall: 0.0,
                    newell: 0.0,
                    norm_newell: 0.0,
                    temp_list_size: 0,
                    final_list_size: 0,
                    accepted: 0,
                    profile_bytes: write_profile(&profile).len(),
                });
            }
        }
    }
    out
}

/// Runs the whole cohort against an already loaded store.
pub fn run_with_store(config: &ExperimentConfig, store: &ProposalStore) -> Result<ExperimentOutput> {
    config.validate()?;
    let users = generate_cohort(config)?;
    let mut anomalies = Vec::new();
    let mut episodes: Vec<Vec<EpisodeRecord>> = users
        .iter()
        .map(|u| run_user(u, store, config, &mut anomalies))
        .collect();

    let max = episodes.iter().flatten().fold(0.0_f64, |m, e| m.max(e.newell));
    for e in episodes.iter_mut().flatten() {
        e.norm_newell = if max > 0.0 { e.newell / max } else { 0.0 };
    }
    let evals: Vec<Vec<QueryEvaluation>> = episodes
        .iter()
        .map(|s| {
            s.iter()
                .map(|e| QueryEvaluation {
                    precision: e.precision,
                    recall: e.recall,
                    newell: e.newell,
                })
                .collect()
        })
        .collect();
    let series = cohort_averages(&evals)?;
    let profile_bytes = (0..config.n_queries)
        .map(|k| episodes.iter().map(|s| s[k].profile_bytes as f64).sum::<f64>() / episodes.len() as f64)
        .collect();
    Ok(ExperimentOutput {
        episodes,
        series,
        profile_bytes,
        anomalies,
    })
}

/// Loads the corpus and runs the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let store = config.load_store()?;
    if store.is_empty() {
        return Err(invalid("corpus has no proposals"));
    }
    run_with_store(config, &store)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentOutput {
    pub fn write_episodes_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "uid",
            "query_index",
            "sigma",
            "alpha",
            "precision",
            "recall",
            "newell",
            "norm_newell",
            "temp_list_size",
            "final_list_size",
            "accepted",
            "profile_bytes",
        ])?;
        for e in self.episodes.iter().flatten() {
            w.write_record([
                e.uid.clone(),
                e.k.to_string(),
                opt(e.sigma),
                e.alpha.to_string(),
                e.precision.to_string(),
                e.recall.to_string(),
                e.newell.to_string(),
                e.norm_newell.to_string(),
                e.temp_list_size.to_string(),
                e.final_list_size.to_string(),
                e.accepted.to_string(),
                e.profile_bytes.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_profile_size_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["query_index", "avg_profile_bytes"])?;
        for (i, b) in self.profile_bytes.iter().enumerate() {
            w.write_record([(i + 1).to_string(), b.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `series.csv`, `profile_size.csv` and `episodes.csv`.
    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.series.write_csv(fs::File::create(dir.join("series.csv"))?)?;
        self.write_profile_size_csv(fs::File::create(dir.join("profile_size.csv"))?)?;
        self.write_episodes_csv(fs::File::create(dir.join("episodes.csv"))?)?;
        Ok(())
    }

    /// Mean recorded satisfaction over 1-based query indices `from..=to`,
    /// skipping episodes without feedback.
    pub fn mean_sigma(&self, from: usize, to: usize) -> f64 {
        let vals: Vec<f64> = self
            .episodes
            .iter()
            .flatten()
            .filter(|e| (from..=to).contains(&e.k))
            .filter_map(|e| e.sigma)
            .collect();
        if vals.is_empty() {
            0.0
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    }
}
