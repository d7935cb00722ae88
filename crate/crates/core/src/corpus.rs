//! A job-domain taxonomy and a seeded generator for demo corpora.
//!
//! Proposals hang off leaf domains. "Broad" postings are tagged with the
//! whole domain path plus one skill; "focused" postings carry the leaf name
//! and a couple of skills.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{normalize_name, CharValue, JobProposal};

/// One node of the domain tree.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub name: &'static str,
    pub parent: Option<usize>,
    pub skills: &'static [&'static str],
}

/// Seed used for the shipped demo corpus.
pub const DEMO_SEED: u64 = 2009;
/// Seed used for the 30-proposal test fixture.
pub const FIXTURE_SEED: u64 = 30;

/// Domains whose specialization levels are 1, 2, 3 and 4.
pub const LEVEL_DOMAINS: [&str; 4] = [
    "information technology",
    "pharmacy",
    "software support",
    "biomedical scientist",
];

const TREE: &[Domain] = &[
    Domain { name: "information technology", parent: None, skills: &[] },
    Domain { name: "research development", parent: Some(0), skills: &[] },
    Domain { name: "application developer", parent: Some(1), skills: &["java", "sql", "xml", "web services", "uml"] },
    Domain { name: "network administration", parent: Some(1), skills: &["cisco", "tcp/ip", "firewall", "linux", "routing"] },
    Domain { name: "technical support", parent: Some(0), skills: &[] },
    Domain { name: "software support", parent: Some(4), skills: &["helpdesk", "windows", "troubleshooting", "itil", "sql"] },
    Domain { name: "health care", parent: None, skills: &[] },
    Domain { name: "medical", parent: Some(6), skills: &[] },
    Domain { name: "surgeon", parent: Some(7), skills: &["orthopedics", "cardiac surgery", "anesthesia", "trauma", "laparoscopy"] },
    Domain { name: "paramedical", parent: Some(7), skills: &[] },
    Domain { name: "nurse", parent: Some(9), skills: &["intensive care", "pediatrics", "triage", "geriatrics", "anesthesia"] },
    Domain { name: "pharmacy", parent: Some(6), skills: &[] },
    Domain { name: "sales consultant", parent: Some(11), skills: &["drug sales", "negotiation", "crm", "marketing", "pharmacology"] },
    Domain { name: "research", parent: Some(11), skills: &[] },
    Domain { name: "biomedical scientist", parent: Some(13), skills: &["molecular biology", "pcr", "cell culture", "bioinformatics", "pharmacology"] },
    Domain { name: "finance", parent: None, skills: &[] },
    Domain { name: "financial analyst", parent: Some(15), skills: &[] },
    Domain { name: "risk management", parent: Some(16), skills: &["basel", "var models", "credit risk", "sas", "statistics"] },
    Domain { name: "investment consultant", parent: Some(16), skills: &["portfolio", "equities", "bonds", "crm", "statistics"] },
];

const CITIES: &[&str] = &["Rome", "Milan", "Turin", "Naples", "Bologna", "London", "Berlin"];
const LANGUAGES: &[&str] = &["english", "italian", "german", "french", "spanish"];

pub fn taxonomy() -> &'static [Domain] {
    TREE
}

fn index_of(name: &str) -> Option<usize> {
    let name = normalize_name(name);
    TREE.iter().position(|d| d.name == name)
}

/// Depth of a domain (top-level domains are level 1).
pub fn level(name: &str) -> Option<usize> {
    index_of(name).map(|i| path(i).len())
}

/// Indices from the top-level ancestor down to `leaf`.
fn path(leaf: usize) -> Vec<usize> {
    let mut out = vec![leaf];
    let mut cur = leaf;
    while let Some(p) = TREE[cur].parent {
        out.push(p);
        cur = p;
    }
    out.reverse();
    out
}

/// Names of a domain and all its descendants.
pub fn subtree(name: &str) -> BTreeSet<String> {
    let Some(root) = index_of(name) else {
        return BTreeSet::new();
    };
    (0..TREE.len())
        .filter(|&i| path(i).contains(&root))
        .map(|i| TREE[i].name.to_string())
        .collect()
}

/// Leaf domains, optionally restricted to the subtree under `within`.
pub fn leaves(within: Option<&str>) -> Vec<&'static Domain> {
    let allowed = within.map(subtree);
    TREE.iter()
        .filter(|d| !d.skills.is_empty())
        .filter(|d| allowed.as_ref().map_or(true, |a| a.contains(d.name)))
        .collect()
}

/// Ancestor names of a leaf, top-level first, excluding the leaf itself.
pub fn ancestors(leaf: &str) -> Vec<&'static str> {
    match index_of(leaf) {
        Some(i) => {
            let p = path(i);
            p[..p.len() - 1].iter().map(|&j| TREE[j].name).collect()
        }
        None => Vec::new(),
    }
}

fn make_proposal(rng: &mut ChaCha8Rng, serial: usize, leaf: usize) -> JobProposal {
    let domain = &TREE[leaf];
    let mut topics: Vec<&str> = Vec::new();
    if rng.gen_bool(0.35) {
        topics.extend(path(leaf).iter().map(|&i| TREE[i].name));
        topics.push(domain.skills.choose(rng).expect("leaf has skills"));
    } else {
        topics.push(domain.name);
        let n = rng.gen_range(1..=2);
        topics.extend(domain.skills.choose_multiple(rng, n));
    }

    let jid = format!("JP{serial:04}");
    let salary = (rng.gen_range(22..=90) * 1000) as f64;
    let n_langs = rng.gen_range(1..=2);
    let langs: Vec<&str> = LANGUAGES
        .choose_multiple(rng, n_langs)
        .copied()
        .collect();
    JobProposal::new(&jid, &format!("https://jobs.example.org/{jid}"), topics)
        .expect("generated proposal is valid")
        .with_characteristic(
            "salary",
            CharValue::Number {
                value: salary,
                unit: Some("EUR".into()),
            },
        )
        .with_characteristic("city", CharValue::text(CITIES.choose(rng).unwrap()))
        .with_characteristic("languages", CharValue::set(langs))
        .with_characteristic(
            "experience years",
            CharValue::number(rng.gen_range(0..=10) as f64),
        )
}

/// `n` proposals spread evenly over the leaves of the tree.
pub fn generate(n: usize, seed: u64) -> Vec<JobProposal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaf_ids: Vec<usize> = (0..TREE.len()).filter(|&i| !TREE[i].skills.is_empty()).collect();
    (0..n)
        .map(|i| make_proposal(&mut rng, i + 1, leaf_ids[i % leaf_ids.len()]))
        .collect()
}

/// The ~300-proposal demo corpus.
pub fn demo_corpus() -> Vec<JobProposal> {
    generate(300, DEMO_SEED)
}

/// 30 proposals drawn only from the four specialization-level domains.
pub fn fixture_corpus() -> Vec<JobProposal> {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let leaf_ids: Vec<usize> = LEVEL_DOMAINS
        .iter()
        .flat_map(|d| leaves(Some(d)))
        .filter_map(|d| index_of(d.name))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (0..30)
        .map(|i| make_proposal(&mut rng, i + 1, leaf_ids[i % leaf_ids.len()]))
        .collect()
}
