//! A profile over time: topic counts grow, stale topics are pruned, and the
//! whole profile survives an XML round trip.
//!
//!     cargo run --example profile_lifecycle

use std::path::Path;

use jobrec::xml::{parse_profile, write_profile};
use jobrec::{relevance, Constraint, ConstraintKind, Query, UserProfile};

fn main() -> jobrec::Result<()> {
    let mut profile = UserProfile::new("grace");
    profile.set_constraint(Constraint::new("city", ConstraintKind::ExactString("Milan".into()))?);
    profile.set_constraint(Constraint::new(
        "languages",
        ConstraintKind::parse("subset-of-set", "english,italian")?,
    )?);

    let queries: [&[&str]; 6] = [
        &["cobol"],
        &["java"],
        &["java", "sql"],
        &["java"],
        &["uml"],
        &["java", "uml"],
    ];
    for (i, topics) in queries.iter().enumerate() {
        profile.clock += 1;
        profile.update_topic_set(&Query::new(0.4, topics.iter().copied(), i + 1)?);
        profile.record_feedback(0.5, 0.55)?;
        profile.prune_topics(0.25);
        let summary: Vec<String> = profile
            .topics
            .values()
            .map(|t| format!("{}={:.2}", t.name.as_str(), relevance(t, profile.clock)))
            .collect();
        println!("t={} {}", profile.clock, summary.join(" "));
    }

    let xml = write_profile(&profile);
    println!("\n{xml}");
    let back = parse_profile(&xml, Path::new("grace.xml"))?;
    println!("round trip identical: {}", back == profile);
    Ok(())
}
