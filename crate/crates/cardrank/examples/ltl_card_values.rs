//! Fit per-query credit models and print a card-value breakdown.
//!
//! The learning-to-label model explains each page outcome as a bias plus
//! per-card click/view credits; weight x empirical mean gives each card's
//! expected contribution ("value"), a compact diagnostic of what drives
//! satisfaction for a query.
//!
//! ```bash
//! cargo run -p cardrank --example ltl_card_values
//! ```

use cardrank::ltl::{fit_ltl_per_query, FitConfig};
use cardrank::synth::{generate_log, WorldConfig};

fn main() -> cardrank::Result<()> {
    let config = WorldConfig {
        num_queries: 6,
        num_card_types: 8,
        num_sessions: 6_000,
        seed: 23,
        ..WorldConfig::default()
    };
    let (qpvs, truth) = generate_log(&config)?;
    let models = fit_ltl_per_query(&qpvs, &FitConfig::default())?;

    let model = &models[0];
    let query_qpvs: Vec<_> = qpvs.iter().filter(|q| q.query == model.query).cloned().collect();
    println!(
        "query {} ({} QPVs, converged: {})",
        model.query,
        model.num_qpvs_fit,
        model.converged
    );
    println!("bias: {:+.4}\n", model.bias);

    let report = model.card_values(&query_qpvs)?;
    println!(
        "{:<10} {:>9} {:>9} {:>8} {:>9} {:>9} {:>8} {:>9} {:>6}",
        "card", "c.value", "c.weight", "c.mean", "v.value", "v.weight", "v.mean", "total", "truth"
    );
    for card in &report.cards {
        let relevance = truth.relevance(&model.query, &card.card_type).unwrap_or(0.0);
        println!(
            "{:<10} {:>9.4} {:>9.4} {:>8.4} {:>9.4} {:>9.4} {:>8.4} {:>9.4} {:>6.3}",
            card.card_type,
            card.click_value,
            card.click_weight,
            card.click_mean,
            card.view_value,
            card.view_weight,
            card.view_mean,
            card.total_value,
            relevance
        );
    }
    println!("\ncards are sorted by total value; compare against the truth column.");
    Ok(())
}
