use std::collections::BTreeSet;
use std::path::Path;

use jobrec::model::{normalize_name, ConstraintCheck, ProfileTopic};
use jobrec::recommender::topic_dissimilarity;
use jobrec::xml::{parse_jpd, parse_profile, write_jpd, write_profile};
use jobrec::{
    compute_alpha, constraint_filter, dissimilarity, expand, jaccard_similarity, newell_distance,
    pnf_alpha, rank, relevance, select_seeds, ws_alpha, AudacityStrategy, CharValue, Constraint,
    ConstraintKind, GammaSchedule, JobProposal, PastQuery, StrategyKind, Topic, UserProfile,
};
use proptest::prelude::*;

const VOCAB: &[&str] = &["java", "sql", "xml", "uml", "nurse", "triage", "crm", "basel"];
const CITIES: &[&str] = &["Rome", "Milan", "turin"];
const LANGS: &[&str] = &["english", "italian", "german"];

fn topics() -> impl Strategy<Value = BTreeSet<&'static str>> {
    prop::sample::subsequence(VOCAB, 1..=4).prop_map(|v| v.into_iter().collect())
}

fn characteristic() -> impl Strategy<Value = Option<(&'static str, CharValue)>> {
    prop_oneof![
        Just(None),
        (20_000u32..80_000).prop_map(|s| Some(("salary", CharValue::number(s as f64)))),
        prop::sample::select(CITIES).prop_map(|c| Some(("city", CharValue::text(c)))),
        prop::sample::subsequence(LANGS, 0..=3).prop_map(|l| Some(("languages", CharValue::set(l)))),
        // wrong type for the salary feature
        Just(Some(("salary", CharValue::text("negotiable")))),
    ]
}

fn proposals(max: usize) -> impl Strategy<Value = Vec<JobProposal>> {
    prop::collection::vec((topics(), prop::collection::vec(characteristic(), 0..3)), 0..max).prop_map(
        |items| {
            items
                .into_iter()
                .enumerate()
                .map(|(i, (t, chars))| {
                    let jid = format!("J{:02}", i);
                    let mut p = JobProposal::new(&jid, &format!("http://x/{jid}"), t).unwrap();
                    for (f, v) in chars.into_iter().flatten() {
                        p = p.with_characteristic(f, v);
                    }
                    p
                })
                .collect()
        },
    )
}

fn profile() -> impl Strategy<Value = UserProfile> {
    (prop::collection::vec((prop::sample::select(VOCAB), 1u32..6, 0u64..10), 0..6), 10u64..20).prop_map(
        |(entries, clock)| {
            let mut p = UserProfile::new("u");
            p.clock = clock;
            for (name, count, first) in entries {
                let t = Topic::new(name).unwrap();
                p.topics.insert(t.clone(), ProfileTopic::new(t, count, first).unwrap());
            }
            p
        },
    )
}

fn constraint() -> impl Strategy<Value = Constraint> {
    prop_oneof![
        (20_000u32..80_000).prop_map(|v| Constraint::new("salary", ConstraintKind::MinNumber(v as f64)).unwrap()),
        (20_000u32..80_000).prop_map(|v| Constraint::new("salary", ConstraintKind::MaxNumber(v as f64)).unwrap()),
        prop::sample::select(CITIES)
            .prop_map(|c| Constraint::new("city", ConstraintKind::ExactString(c.to_uppercase())).unwrap()),
        prop::sample::subsequence(LANGS, 0..=3).prop_map(|l| {
            Constraint::new("languages", ConstraintKind::parse("subset-of-set", &l.join(",")).unwrap()).unwrap()
        }),
    ]
}

fn unit() -> impl Strategy<Value = f64> {
    (0u32..=1000).prop_map(|v| v as f64 / 1000.0)
}

fn history(max: usize) -> impl Strategy<Value = Vec<PastQuery>> {
    prop::collection::vec((unit(), unit()), 0..max)
        .prop_map(|v| v.into_iter().map(|(s, a)| PastQuery::new(s, a).unwrap()).collect())
}

fn tset(names: &BTreeSet<&str>) -> BTreeSet<Topic> {
    names.iter().map(|n| Topic::new(n).unwrap()).collect()
}

proptest! {
    #[test]
    fn dissimilarity_is_a_symmetric_unit_measure(a in topics(), b in topics()) {
        let (a, b) = (tset(&a), tset(&b));
        let d = topic_dissimilarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, topic_dissimilarity(&b, &a));
        prop_assert_eq!(topic_dissimilarity(&a, &a), 0.0);
        prop_assert_eq!(d == 1.0, a.is_disjoint(&b));
    }

    #[test]
    fn jaccard_is_symmetric_and_bounded(a in topics(), b in topics()) {
        let j = jaccard_similarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert_eq!(j, jaccard_similarity(&b, &a));
        prop_assert_eq!(jaccard_similarity(&a, &a), 1.0);
    }

    #[test]
    fn rank_is_a_sorted_permutation(items in proposals(12), p in profile()) {
        let list = rank(&items, &p);
        let got: BTreeSet<&str> = list.jids().collect();
        let want: BTreeSet<&str> = items.iter().map(|p| p.jid.as_str()).collect();
        prop_assert_eq!(got, want);
        prop_assert_eq!(list.len(), items.len());
        for w in list.entries.windows(2) {
            prop_assert!(
                w[0].score > w[1].score
                    || (w[0].score == w[1].score && w[0].proposal.jid < w[1].proposal.jid)
            );
        }
    }

    #[test]
    fn expand_is_monotone_and_structured(
        items in proposals(14),
        p in profile(),
        sel in unit(),
        a1 in unit(),
        a2 in unit(),
    ) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let list = rank(&items, &p);
        let seeds = select_seeds(&list, sel);
        let small: BTreeSet<String> = expand(&list, &seeds, lo).into_iter().collect();
        let large: BTreeSet<String> = expand(&list, &seeds, hi).into_iter().collect();
        prop_assert!(small.is_subset(&large));
        let seed_set: BTreeSet<String> = seeds.iter().cloned().collect();
        prop_assert!(seed_set.is_subset(&small));
        for jid in &large {
            let e = list.get(jid).unwrap();
            prop_assert!(
                seed_set.contains(jid)
                    || seeds.iter().any(|s| dissimilarity(&e.proposal, &list.get(s).unwrap().proposal) <= hi)
            );
        }
    }

    #[test]
    fn constraint_filter_matches_brute_force(items in proposals(12), cs in prop::collection::vec(constraint(), 0..3)) {
        let (kept, diag) = constraint_filter(&items, &cs);
        let brute: Vec<&JobProposal> = items
            .iter()
            .filter(|p| cs.iter().all(|c| match (&c.kind, p.characteristics.get(&c.feature)) {
                (ConstraintKind::MinNumber(b), Some(CharValue::Number { value, .. })) => value >= b,
                (ConstraintKind::MaxNumber(b), Some(CharValue::Number { value, .. })) => value <= b,
                (ConstraintKind::ExactString(w), Some(CharValue::Text(h))) => w.to_lowercase() == h.to_lowercase(),
                (ConstraintKind::SubsetOf(allowed), Some(CharValue::Set(h))) => h.iter().all(|x| allowed.contains(x)),
                _ => false,
            }))
            .collect();
        prop_assert_eq!(kept, brute);
        let failures: usize = items
            .iter()
            .map(|p| cs.iter().filter(|c| c.check(p) != ConstraintCheck::Satisfied).count())
            .sum();
        prop_assert_eq!(diag.violated + diag.missing_feature + diag.type_mismatch, failures);
    }

    #[test]
    fn pnf_is_monotone_in_sigma(alpha in unit(), s1 in unit(), s2 in unit()) {
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let a_lo = pnf_alpha(&[PastQuery::new(lo, alpha).unwrap()], 0.55);
        let a_hi = pnf_alpha(&[PastQuery::new(hi, alpha).unwrap()], 0.55);
        prop_assert!(a_lo <= a_hi);
        prop_assert!((0.0..=1.0).contains(&a_lo) && (0.0..=1.0).contains(&a_hi));
    }

    #[test]
    fn every_strategy_stays_in_the_unit_interval(h in history(30), k in 1usize..40) {
        for kind in [StrategyKind::Pnf, StrategyKind::Lse2, StrategyKind::Ws] {
            let a = compute_alpha(&h, &AudacityStrategy::of_kind(kind), k);
            prop_assert!((0.0..=1.0).contains(&a), "{kind}: {a}");
        }
    }

    #[test]
    fn ws_lies_between_its_parts(h in history(20), g in unit(), k in 1usize..30) {
        let pnf = compute_alpha(&h, &AudacityStrategy::of_kind(StrategyKind::Pnf), k);
        let lse = compute_alpha(&h, &AudacityStrategy::of_kind(StrategyKind::Lse2), k);
        let ws = AudacityStrategy {
            gamma: GammaSchedule::Constant(g),
            ..AudacityStrategy::of_kind(StrategyKind::Ws)
        };
        let a = ws_alpha(&h, &ws, k);
        prop_assert!(a >= pnf.min(lse) - 1e-12 && a <= pnf.max(lse) + 1e-12);
    }

    #[test]
    fn relevance_grows_with_count_and_shrinks_with_age(count in 1u32..50, first in 0u64..50, age in 0u64..50) {
        let t = Topic::new("java").unwrap();
        let now = first + age;
        let base = relevance(&ProfileTopic::new(t.clone(), count, first).unwrap(), now);
        let more = relevance(&ProfileTopic::new(t.clone(), count + 1, first).unwrap(), now);
        let later = relevance(&ProfileTopic::new(t, count, first).unwrap(), now + 1);
        prop_assert!(more > base);
        prop_assert!(later <= base);
    }

    #[test]
    fn newell_is_symmetric_and_zero_on_identity(perm in Just((1..=6usize).collect::<Vec<_>>()).prop_shuffle()) {
        let id: Vec<usize> = (1..=6).collect();
        prop_assert_eq!(newell_distance(&id, &id).unwrap(), 0.0);
        prop_assert_eq!(newell_distance(&perm, &id).unwrap(), newell_distance(&id, &perm).unwrap());
    }

    #[test]
    fn jpd_round_trip_is_identity(items in proposals(10)) {
        let xml = write_jpd(&items);
        let back = parse_jpd(&xml, Path::new("p.xml")).unwrap();
        prop_assert!(back.rejects.is_empty());
        prop_assert_eq!(&back.proposals, &items);
        prop_assert_eq!(write_jpd(&back.proposals), xml);
    }

    #[test]
    fn profile_round_trip_is_identity(
        mut p in profile(),
        h in history(10),
        cs in prop::collection::vec(constraint(), 0..3),
    ) {
        p.past_queries = h;
        for c in cs {
            p.set_constraint(c);
        }
        let xml = write_profile(&p);
        let back = parse_profile(&xml, Path::new("u.xml")).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(write_profile(&back), xml);
    }

    #[test]
    fn names_normalize_idempotently(raw in "[ A-Za-z]{1,12}") {
        let once = normalize_name(&raw);
        prop_assert_eq!(normalize_name(&once), once.clone());
    }
}
