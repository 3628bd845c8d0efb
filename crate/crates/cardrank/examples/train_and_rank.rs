//! Full pointwise pipeline: generate a log, derive labels, train a ranker,
//! and rank a candidate pool next to the ground-truth oracle.
//!
//! ```bash
//! cargo run -p cardrank --example train_and_rank
//! ```

use cardrank::eval::{train_strategy_model, StrategyOptions};
use cardrank::gbt::GbtConfig;
use cardrank::labeling::Strategy;
use cardrank::ranking::{rank_pointwise, FeatureIndex, RankRequest};
use cardrank::synth::{generate_log, oracle_ranking, WorldConfig};

fn main() -> cardrank::Result<()> {
    let config = WorldConfig {
        num_queries: 20,
        num_card_types: 10,
        num_sessions: 8_000,
        seed: 5,
        ..WorldConfig::default()
    };
    let (qpvs, truth) = generate_log(&config)?;
    println!("log: {} QPVs", qpvs.len());

    let index = FeatureIndex::build(&qpvs);
    let gbt = GbtConfig { seed: 5, ..GbtConfig::default() };
    let model = train_strategy_model(
        Strategy::Apl,
        &qpvs,
        &index,
        &gbt,
        &StrategyOptions::default(),
    )?;
    println!(
        "trained approximated-pairwise ranker: {} trees over {} features\n",
        model.trees.len(),
        model.num_features
    );

    let query = "q_0004";
    let pool: Vec<String> = truth.queries[query].ideal_ranking[..5].to_vec();
    let request = RankRequest::new(query, pool.clone());

    let predicted = rank_pointwise(&model, &index, &request)?;
    let oracle = oracle_ranking(&truth, query, &request.candidate_cards)?;

    println!("query {query}, candidate pool: {}", pool.join(", "));
    println!("model ranking:  {}", predicted.ranking.join(" > "));
    println!("oracle ranking: {}", oracle.ranking.join(" > "));
    for card in &predicted.ranking {
        println!(
            "  {card}: true relevance {:.3}",
            truth.relevance(query, card).unwrap_or(0.0)
        );
    }
    Ok(())
}
