//! How each audacity strategy reacts to the same satisfaction history.
//!
//!     cargo run --example audacity_strategies

use jobrec::{
    compute_alpha, fit_parabola, maximize_on_unit_interval, AudacityStrategy, GammaSchedule,
    PastQuery, StrategyKind,
};

fn main() -> jobrec::Result<()> {
    // a user who is happiest with moderately adventurous lists
    let truth = |a: f64| 0.8 - (a - 0.6) * (a - 0.6);
    let mut history: Vec<PastQuery> = Vec::new();

    let lse = AudacityStrategy::of_kind(StrategyKind::Lse2);
    println!(" k   alpha   sigma");
    for k in 1..=8 {
        let alpha = compute_alpha(&history, &lse, k);
        let sigma = truth(alpha);
        println!("{k:>2}  {alpha:.4}  {sigma:.4}");
        history.push(PastQuery::new(sigma, alpha)?);
    }

    let xs: Vec<f64> = history.iter().map(|q| q.alpha).collect();
    let ys: Vec<f64> = history.iter().map(|q| q.sigma).collect();
    let fit = fit_parabola(&xs, &ys)?;
    println!(
        "fit {:.4} x^2 + {:.4} x + {:.4}, residual {:.2e}, best alpha {:.4}",
        fit.a0, fit.a1, fit.a2, fit.residual,
        maximize_on_unit_interval(&fit)
    );

    println!();
    println!("next alpha after this history, by strategy:");
    let k = history.len() + 1;
    for (label, strategy) in [
        ("pnf", AudacityStrategy::of_kind(StrategyKind::Pnf)),
        ("2-lse", AudacityStrategy::of_kind(StrategyKind::Lse2)),
        ("ws decaying", AudacityStrategy::of_kind(StrategyKind::Ws)),
        (
            "ws gamma=0.5",
            AudacityStrategy {
                gamma: GammaSchedule::Constant(0.5),
                ..AudacityStrategy::of_kind(StrategyKind::Ws)
            },
        ),
        (
            "override 0.2",
            AudacityStrategy {
                manual_override: Some(0.2),
                ..AudacityStrategy::default()
            },
        ),
    ] {
        println!("  {label:<13} {:.4}", compute_alpha(&history, &strategy, k));
    }
    Ok(())
}
