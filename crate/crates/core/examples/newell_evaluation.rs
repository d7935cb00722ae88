//! Precision, recall and the Newell ranking distance on a small example.
//!
//!     cargo run --example newell_evaluation

use std::collections::BTreeSet;

use jobrec::evaluation::newell_weight;
use jobrec::{newell_distance, newell_from_orders, normalize_newell, precision_recall};

fn main() -> jobrec::Result<()> {
    let recommended: BTreeSet<&str> = ["J1", "J2", "J3", "J4"].into();
    let relevant: BTreeSet<&str> = ["J1", "J2", "J3", "J7", "J8", "J9"].into();
    let (p, r) = precision_recall(&recommended, &relevant);
    println!("precision {p}, recall {r}");

    let n = 5;
    let weights: Vec<String> = (1..=n).map(|i| format!("{:.3}", newell_weight(i, n))).collect();
    println!("weights for n = {n}: {}", weights.join(" "));

    // moving the top item hurts far more than swapping the bottom two
    let sys = ["A", "B", "C", "D", "E"];
    let top_moved = ["B", "C", "A", "D", "E"];
    let tail_swapped = ["A", "B", "C", "E", "D"];
    let d_top = newell_from_orders(&sys, &top_moved)?;
    let d_tail = newell_from_orders(&sys, &tail_swapped)?;
    println!("top item demoted: {d_top:.3}, last two swapped: {d_tail:.3}");

    let reversed = newell_distance(&[3, 2, 1], &[1, 2, 3])?;
    println!("full reversal of three items: {reversed}");

    let normalized = normalize_newell(&[vec![d_top, d_tail], vec![reversed]]);
    println!("normalized by the run maximum: {normalized:?}");
    Ok(())
}
