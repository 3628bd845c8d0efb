//! Generate a synthetic QPV log and summarize it.
//!
//! ```bash
//! cargo run -p cardrank --example generate_log
//! ```

use cardrank::stats::compute_stats;
use cardrank::synth::{generate_log, WorldConfig};

fn main() -> cardrank::Result<()> {
    let config = WorldConfig {
        num_queries: 30,
        num_card_types: 10,
        num_sessions: 5_000,
        seed: 11,
        ..WorldConfig::default()
    };
    let (qpvs, truth) = generate_log(&config)?;
    let report = compute_stats(&qpvs)?;

    println!("generated {} QPVs over {} sessions", report.num_qpvs, config.num_sessions);
    println!(
        "{} distinct queries, {} card types",
        report.num_distinct_queries, report.num_card_types
    );

    println!("\ncards per page:");
    for (count, pct) in &report.cards_per_qpv_distribution {
        let split = &report.label_split_per_card_count[count];
        println!(
            "  {count} cards: {pct:5.2}% of QPVs ({:.2}% satisfied / {:.2}% reformulated)",
            split.positive_pct, split.negative_pct
        );
    }

    println!("\nreformulation-ratio histogram (per query):");
    for (bucket, queries) in &report.reformulation_ratio_histogram {
        println!("  ratio {bucket}: {queries} queries");
    }

    let example = truth.queries.values().next().expect("at least one query");
    println!(
        "\nideal ranking for {}: {}",
        example.query,
        example.ideal_ranking.join(" > ")
    );
    Ok(())
}
