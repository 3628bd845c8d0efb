//! Derive labels with every strategy from one reformulation event.
//!
//! The session shows c1 > c2 > c3 > c4, the user reformulates, the next
//! page shows c3 > c2 > c5 > c4 and satisfies. Each strategy reads that
//! differently; this prints them side by side.
//!
//! ```bash
//! cargo run -p cardrank --example label_strategies
//! ```

use cardrank::labeling::{
    label_approx_pairwise, label_discounted_pointwise, label_listwise, label_movement_pointwise,
    label_naive_pointwise, label_pairwise, AplSignRule, MovementConfig, PositivePolicy,
};
use cardrank::qpv::{chain_sessions, CardObservation, Qpv};

fn page(qpv_id: &str, ts: i64, reformulated: bool, cards: &[&str]) -> Qpv {
    Qpv {
        qpv_id: qpv_id.into(),
        session_id: "session-1".into(),
        timestamp_ms: ts,
        query: "w".into(),
        reformulated,
        cards: cards
            .iter()
            .enumerate()
            .map(|(i, &card_type)| CardObservation {
                card_type: card_type.into(),
                rank: i as u32 + 1,
                viewed: true,
                clicked: false,
                num_links: 5,
                num_link_clicks: 0,
            })
            .collect(),
    }
}

fn main() -> cardrank::Result<()> {
    let qpvs = vec![
        page("q1", 1_000, true, &["c1", "c2", "c3", "c4"]),
        page("q2", 2_000, false, &["c3", "c2", "c5", "c4"]),
    ];
    let pairs = chain_sessions(&qpvs)?;

    println!("naive pointwise:");
    for label in label_naive_pointwise(&qpvs, &pairs, PositivePolicy::All) {
        println!("  {} {}: {:+.0}", label.qpv_id, label.card_type, label.label);
    }

    println!("\ndiscounted pointwise (1/ln(1+rank)):");
    for label in label_discounted_pointwise(&qpvs, &pairs, PositivePolicy::All) {
        println!("  {} {}: {:+.4}", label.qpv_id, label.card_type, label.label);
    }

    println!("\nmovement pointwise (rank changes across the pair):");
    for label in label_movement_pointwise(&pairs, &MovementConfig::default()) {
        println!("  {} {}: {:+.0}", label.qpv_id, label.card_type, label.label);
    }

    println!("\npairwise preferences:");
    for label in label_pairwise(&qpvs) {
        println!(
            "  {} {} > {}: {:+}",
            label.qpv_id, label.preferred, label.other, label.label
        );
    }

    println!("\napproximated pairwise, combined per card:");
    for label in label_approx_pairwise(&qpvs, true, AplSignRule::Definition) {
        println!("  {} {}: {:+.0}", label.qpv_id, label.card_type, label.label);
    }

    println!("\nlistwise:");
    for label in label_listwise(&qpvs) {
        println!("  {} {}: {:+}", label.qpv_id, label.ranking.join(" > "), label.label);
    }
    Ok(())
}
