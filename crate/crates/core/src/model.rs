//! Domain types shared across the engine, and the profile lifecycle:
//! topic counting, relevance decay, pruning, satisfaction and feedback.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;

use crate::error::{invalid, Error, Result};

/// Case-folds and trims a topic or set item.
pub fn normalize_name(raw: &str) -> String {
    raw.trim().to_lowercase()
}

/// A topic, identified by its normalized name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Topic(String);

impl Topic {
    pub fn new(raw: &str) -> Result<Self> {
        let name = normalize_name(raw);
        if name.is_empty() {
            return Err(invalid("topic name is blank"));
        }
        Ok(Topic(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for Topic {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Builds a normalized topic set, rejecting blank names.
pub fn topic_set<I, S>(names: I) -> Result<BTreeSet<Topic>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(|n| Topic::new(n.as_ref())).collect()
}

/// A topic the user has asked about, with its access counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileTopic {
    pub name: Topic,
    pub count: u32,
    pub first_time_stamp: u64,
}

impl ProfileTopic {
    pub fn new(name: Topic, count: u32, first_time_stamp: u64) -> Result<Self> {
        if count == 0 {
            return Err(invalid(format!("topic {name}: count must be >= 1")));
        }
        Ok(ProfileTopic {
            name,
            count,
            first_time_stamp,
        })
    }
}

/// Relevance of a profile topic at clock `t`: `count / (t - first_time_stamp)`.
///
/// The denominator is clamped to at least 1, so a topic introduced by the
/// current query scores its raw count instead of dividing by zero.
pub fn relevance(topic: &ProfileTopic, t: u64) -> f64 {
    let age = t.saturating_sub(topic.first_time_stamp).max(1);
    f64::from(topic.count) / age as f64
}

/// Typed value of a job characteristic.
#[derive(Clone, Debug, PartialEq)]
pub enum CharValue {
    Number { value: f64, unit: Option<String> },
    Text(String),
    Set(BTreeSet<String>),
}

impl CharValue {
    pub fn number(value: f64) -> Self {
        CharValue::Number { value, unit: None }
    }

    pub fn text(value: &str) -> Self {
        CharValue::Text(value.trim().to_string())
    }

    /// Builds a set value; items are trimmed and case-folded, blanks dropped.
    pub fn set<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        CharValue::Set(
            items
                .into_iter()
                .map(|s| normalize_name(s.as_ref()))
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            CharValue::Number { .. } => "number",
            CharValue::Text(_) => "string",
            CharValue::Set(_) => "set",
        }
    }
}

/// How a constraint compares against a proposal characteristic.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintKind {
    /// Characteristic must be a number `>=` the bound.
    MinNumber(f64),
    /// Characteristic must be a number `<=` the bound.
    MaxNumber(f64),
    /// Characteristic must be a string equal to this one, ignoring case.
    ExactString(String),
    /// Characteristic must be a set contained in this one.
    SubsetOf(BTreeSet<String>),
}

impl ConstraintKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ConstraintKind::MinNumber(_) => "min-number",
            ConstraintKind::MaxNumber(_) => "max-number",
            ConstraintKind::ExactString(_) => "exact-string",
            ConstraintKind::SubsetOf(_) => "subset-of-set",
        }
    }

    /// Parses a kind tag plus its textual value.
    pub fn parse(tag: &str, value: &str) -> Result<Self> {
        let number = || {
            value
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(format!("{tag}: `{value}` is not a number")))
        };
        match tag {
            "min-number" => Ok(ConstraintKind::MinNumber(number()?)),
            "max-number" => Ok(ConstraintKind::MaxNumber(number()?)),
            "exact-string" => Ok(ConstraintKind::ExactString(value.trim().to_string())),
            "subset-of-set" => match CharValue::set(value.split(',')) {
                CharValue::Set(items) => Ok(ConstraintKind::SubsetOf(items)),
                _ => unreachable!(),
            },
            other => Err(invalid(format!("unknown constraint kind `{other}`"))),
        }
    }

    /// Textual value as written to XML.
    pub fn value_text(&self) -> String {
        match self {
            ConstraintKind::MinNumber(v) | ConstraintKind::MaxNumber(v) => v.to_string(),
            ConstraintKind::ExactString(s) => s.clone(),
            ConstraintKind::SubsetOf(items) => join_set(items),
        }
    }
}

pub(crate) fn join_set(items: &BTreeSet<String>) -> String {
    items.iter().map(String::as_str).collect::<Vec<_>>().join(",")
}

/// Result of checking one constraint against one proposal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintCheck {
    Satisfied,
    Violated,
    /// The proposal has no characteristic for the constrained feature.
    Missing,
    /// The characteristic exists but its type does not fit the constraint kind.
    TypeMismatch,
}

/// A user requirement on one feature.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub feature: String,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn new(feature: &str, kind: ConstraintKind) -> Result<Self> {
        let feature = feature.trim();
        if feature.is_empty() {
            return Err(invalid("constraint feature is blank"));
        }
        Ok(Constraint {
            feature: feature.to_string(),
            kind,
        })
    }

    pub fn check(&self, proposal: &JobProposal) -> ConstraintCheck {
        let Some(value) = proposal.characteristics.get(&self.feature) else {
            return ConstraintCheck::Missing;
        };
        let ok = match (&self.kind, value) {
            (ConstraintKind::MinNumber(bound), CharValue::Number { value, .. }) => value >= bound,
            (ConstraintKind::MaxNumber(bound), CharValue::Number { value, .. }) => value <= bound,
            (ConstraintKind::ExactString(want), CharValue::Text(have)) => {
                want.trim().to_lowercase() == have.trim().to_lowercase()
            }
            (ConstraintKind::SubsetOf(allowed), CharValue::Set(have)) => have.is_subset(allowed),
            _ => return ConstraintCheck::TypeMismatch,
        };
        if ok {
            ConstraintCheck::Satisfied
        } else {
            ConstraintCheck::Violated
        }
    }
}

/// A job proposal: identifier, link, topics and typed characteristics.
#[derive(Clone, Debug, PartialEq)]
pub struct JobProposal {
    pub jid: String,
    pub jurl: String,
    pub topics: BTreeSet<Topic>,
    /// Keyed by feature name, in insertion order.
    pub characteristics: IndexMap<String, CharValue>,
}

impl JobProposal {
    pub fn new<I, S>(jid: &str, jurl: &str, topics: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let proposal = JobProposal {
            jid: jid.trim().to_string(),
            jurl: jurl.trim().to_string(),
            topics: topic_set(topics)?,
            characteristics: IndexMap::new(),
        };
        proposal.validate()?;
        Ok(proposal)
    }

    pub fn with_characteristic(mut self, feature: &str, value: CharValue) -> Self {
        self.characteristics.insert(feature.trim().to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.jid.is_empty() {
            return Err(invalid("proposal has a blank JID"));
        }
        if self.topics.is_empty() {
            return Err(invalid(format!("proposal {} has no topics", self.jid)));
        }
        if self.characteristics.keys().any(|k| k.is_empty()) {
            return Err(invalid(format!("proposal {} has a blank feature", self.jid)));
        }
        for (feature, value) in &self.characteristics {
            if let CharValue::Set(items) = value {
                if items.iter().any(|i| i.contains(',')) {
                    return Err(invalid(format!(
                        "proposal {}: set item in `{feature}` contains a comma",
                        self.jid
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn has_topic(&self, name: &str) -> bool {
        self.topics.contains(name)
    }
}

/// Satisfaction and audacity recorded after one answered query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PastQuery {
    pub sigma: f64,
    pub alpha: f64,
}

impl PastQuery {
    pub fn new(sigma: f64, alpha: f64) -> Result<Self> {
        check_unit("sigma", sigma)?;
        check_unit("alpha", alpha)?;
        Ok(PastQuery { sigma, alpha })
    }
}

fn round6(v: f64) -> f64 {
    if v.is_finite() {
        (v * 1e6).round() / 1e6
    } else {
        v
    }
}

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// A query: selectivity degree, requested topics and its 1-based index.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub sel_degree: f64,
    pub topics: BTreeSet<Topic>,
    pub k: usize,
}

impl Query {
    pub fn new<I, S>(sel_degree: f64, topics: I, k: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        check_unit("sel_degree", sel_degree)?;
        let topics = topic_set(topics)?;
        if topics.is_empty() {
            return Err(invalid("query has no topics"));
        }
        if k == 0 {
            return Err(invalid("query index is 1-based"));
        }
        Ok(Query {
            sel_degree,
            topics,
            k,
        })
    }
}

/// Everything the engine knows about one user.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UserProfile {
    pub uid: String,
    pub topics: BTreeMap<Topic, ProfileTopic>,
    pub constraints: Vec<Constraint>,
    pub past_queries: Vec<PastQuery>,
    /// Query clock; one tick per submitted query.
    pub clock: u64,
}

impl UserProfile {
    pub fn new(uid: &str) -> Self {
        UserProfile {
            uid: uid.to_string(),
            ..Default::default()
        }
    }

    /// Index the next submitted query must carry.
    pub fn next_query_index(&self) -> usize {
        self.past_queries.len() + 1
    }

    /// Adds a constraint, replacing any existing one with the same feature and kind.
    pub fn set_constraint(&mut self, constraint: Constraint) {
        let same = |c: &Constraint| {
            c.feature == constraint.feature && c.kind.tag() == constraint.kind.tag()
        };
        match self.constraints.iter_mut().find(|c| same(c)) {
            Some(slot) => *slot = constraint,
            None => self.constraints.push(constraint),
        }
    }

    /// Bumps the counter of every query topic, inserting unseen topics
    /// stamped with the current clock.
    pub fn update_topic_set(&mut self, query: &Query) {
        for name in &query.topics {
            self.topics
                .entry(name.clone())
                .and_modify(|t| t.count += 1)
                .or_insert_with(|| ProfileTopic {
                    name: name.clone(),
                    count: 1,
                    first_time_stamp: self.clock,
                });
        }
    }

    /// Drops every topic whose relevance at the current clock is below `threshold`.
    pub fn prune_topics(&mut self, threshold: f64) {
        let clock = self.clock;
        self.topics.retain(|_, t| relevance(t, clock) >= threshold);
    }

    /// Appends a feedback pair, rounded to the six decimals the profile
    /// file stores so that a saved and reloaded profile behaves identically.
    pub fn record_feedback(&mut self, sigma: f64, alpha: f64) -> Result<()> {
        self.past_queries.push(PastQuery::new(round6(sigma), round6(alpha))?);
        Ok(())
    }

    pub fn topic_names(&self) -> BTreeSet<Topic> {
        self.topics.keys().cloned().collect()
    }
}

/// Fraction of recommended proposals the user accepted.
pub fn satisfaction(recommended: usize, accepted: usize) -> Result<f64> {
    if recommended == 0 {
        return Err(Error::NoRecommendations);
    }
    if accepted > recommended {
        return Err(invalid(format!(
            "accepted {accepted} of only {recommended} recommendations"
        )));
    }
    Ok(accepted as f64 / recommended as f64)
}

/// `|a ∩ b| / |a ∪ b|`, with two empty sets counting as identical.
pub fn jaccard_similarity<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}
