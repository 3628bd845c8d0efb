//! Compare labeling strategies with query-disjoint cross-validation.
//!
//! Runs the full pipeline (labels, feature index, boosted trees, exact-match
//! scoring) per fold for a handful of strategies and prints a comparison
//! table sorted by mean F-measure.
//!
//! ```bash
//! cargo run --release -p cardrank --example cross_validate
//! ```

use cardrank::eval::{cross_validate, CvConfig, StrategyOptions};
use cardrank::gbt::GbtConfig;
use cardrank::labeling::Strategy;
use cardrank::synth::{generate_log, WorldConfig};

fn main() -> cardrank::Result<()> {
    let config = WorldConfig {
        num_queries: 40,
        num_card_types: 10,
        num_sessions: 10_000,
        seed: 17,
        ..WorldConfig::default()
    };
    let (qpvs, _) = generate_log(&config)?;
    println!("log: {} QPVs over {} queries\n", qpvs.len(), config.num_queries);

    let gbt = GbtConfig { seed: 17, ..GbtConfig::default() };
    let cv = CvConfig { num_folds: 5, seed: 17, ..CvConfig::default() };
    let opts = StrategyOptions::default();

    let strategies = [
        Strategy::Npl,
        Strategy::Dpl,
        Strategy::Mpl,
        Strategy::Apl,
        Strategy::Ll,
        Strategy::Ltl,
        Strategy::Ctr,
    ];
    let mut rows = Vec::new();
    for strategy in strategies {
        let report = cross_validate(&qpvs, strategy, &gbt, &cv, &opts)?;
        rows.push((strategy, report.summary));
    }
    rows.sort_by(|a, b| b.1.mean_f_measure.total_cmp(&a.1.mean_f_measure));

    println!(
        "{:<6} {:>8} {:>8} {:>10} {:>10}",
        "name", "tpr", "tnr", "1-tnr", "f-measure"
    );
    for (strategy, summary) in rows {
        println!(
            "{:<6} {:>7.2}% {:>7.2}% {:>9.2}% {:>9.2}%",
            strategy.name(),
            100.0 * summary.mean_tpr,
            100.0 * summary.mean_tnr,
            100.0 * (1.0 - summary.mean_tnr),
            100.0 * summary.mean_f_measure
        );
    }
    Ok(())
}
