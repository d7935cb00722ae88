//! One user, three queries against the demo corpus, with feedback after
//! each answer.
//!
//!     cargo run --example quickstart

use std::collections::BTreeSet;

use jobrec::corpus::demo_corpus;
use jobrec::{
    complete_query, run_query, AudacityStrategy, Constraint, ConstraintKind, EngineConfig,
    ProposalStore, Query, StrategyKind, UserProfile,
};

fn main() -> jobrec::Result<()> {
    let store: ProposalStore = demo_corpus().into_iter().collect();
    let strategy = AudacityStrategy::of_kind(StrategyKind::Pnf);
    let config = EngineConfig::default();

    let mut profile = UserProfile::new("ada");
    profile.set_constraint(Constraint::new("salary", ConstraintKind::MinNumber(40_000.0))?);

    let sessions: [&[&str]; 3] = [&["java", "sql"], &["application developer"], &["java", "uml"]];
    for topics in sessions {
        let query = Query::new(0.4, topics.iter().copied(), profile.next_query_index())?;
        let result = run_query(&mut profile, &query, &store, &strategy)?;
        println!(
            "query {} {:?}: {} candidates, {} seeds, {} recommended at alpha {:.3}",
            query.k,
            topics,
            result.temp_list.len(),
            result.seeds.len(),
            result.final_list.len(),
            result.alpha_used
        );
        for p in result.final_proposals().iter().take(5) {
            let names: Vec<&str> = p.topics.iter().map(|t| t.as_str()).collect();
            println!("  {} {}", p.jid, names.join(", "));
        }

        // accept every other recommendation
        let accepted: BTreeSet<String> = result.final_list.iter().step_by(2).cloned().collect();
        if let Some(sigma) = complete_query(&mut profile, &result, &accepted, &config)? {
            println!("  satisfaction {sigma:.3}");
        }
    }

    println!("profile topics:");
    for t in profile.topics.values() {
        println!("  {:<24} count {} since {}", t.name.as_str(), t.count, t.first_time_stamp);
    }
    Ok(())
}
