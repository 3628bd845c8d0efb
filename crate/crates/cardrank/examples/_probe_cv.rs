use cardrank::eval::*;
use cardrank::gbt::GbtConfig;
use cardrank::labeling::{import_human_judgments, Strategy};
use cardrank::qpv::Qpv;
use cardrank::ranking::PredictedRanking;
use cardrank::synth::{generate_log, oracle_ranking, GroundTruth, WorldConfig};
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Noisy quantized grades from truth, for a fraction of queries.
fn noisy_judgments(truth: &GroundTruth, fraction: f64, noise: f64, seed: u64) -> String {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut tsv = String::new();
    let n = truth.queries.len();
    let judged = ((n as f64 * fraction).round() as usize).max(1);
    for (qi, t) in truth.queries.values().enumerate() {
        if qi % (n / judged).max(1) != 0 { continue; }
        for (card, &rel) in &t.relevance {
            let noisy = rel + rng.random_range(-noise..noise);
            let grade = if noisy >= 0.8 { "Excellent" } else if noisy >= 0.6 { "Good" }
                else if noisy >= 0.4 { "Neutral" } else if noisy >= 0.2 { "Poor" } else { "Very Poor" };
            writeln!(tsv, "{}\t{}\t{}", t.query, card, grade).unwrap();
        }
    }
    tsv
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let sessions: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(15_000);
    let steep: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2.0);
    let frac: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let noise: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.4);
    let world_seed: u64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(4242);
    let conc: f64 = args.get(8).map(|s| s.parse().unwrap()).unwrap_or(2.0);

    let config = WorldConfig {
        num_queries: 120,
        num_card_types: 12,
        num_sessions: sessions,
        cards_per_page_distribution: BTreeMap::from([(3, 0.7), (4, 0.3)]),
        relevance_concentration: conc,
        reformulation_steepness: steep,
        seed: world_seed,
        ..WorldConfig::default()
    };
    let t0 = std::time::Instant::now();
    let (qpvs, truth) = generate_log(&config).unwrap();
    let neg = qpvs.iter().filter(|q| q.reformulated).count();
    println!("{} qpvs, {:.2}% negative, gen {:?}", qpvs.len(), 100.0*neg as f64/qpvs.len() as f64, t0.elapsed());

    let judgments = import_human_judgments(noisy_judgments(&truth, frac, noise, 99).as_bytes()).unwrap();
    println!("judgments: {} rows", judgments.len());

    let subsample: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let min_leaf: usize = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(20);
    let gbt = GbtConfig { seed: 4242, feature_subsample: subsample, min_samples_per_leaf: min_leaf, ..GbtConfig::default() };
    let cv = CvConfig { num_folds: 5, seed: 4242, ..CvConfig::default() };
    let opts = StrategyOptions { human_judgments: Some(judgments), ..StrategyOptions::default() };

    for strategy in Strategy::ALL {
        let t = std::time::Instant::now();
        let report = cross_validate(&qpvs, strategy, &gbt, &cv, &opts).unwrap();
        println!("{:<6} mean F {:.4} (tpr {:.3} tnr {:.3}) [{:?}]",
            strategy.name(), report.summary.mean_f_measure,
            report.summary.mean_tpr, report.summary.mean_tnr, t.elapsed());
    }

    // Oracle over the same folds.
    let mut fs = Vec::new();
    for fold in 0..cv.num_folds {
        let eval_set: Vec<Qpv> = qpvs.iter().cloned().filter(|q| fold_of(&q.query, &cv) == fold).collect();
        let preds: HashMap<String, PredictedRanking> = eval_set.iter().map(|qpv| {
            let pool = qpv.ranking().into_iter().collect();
            (qpv.qpv_id.clone(), oracle_ranking(&truth, &qpv.query, &pool).unwrap())
        }).collect();
        fs.push(evaluate(&preds, &eval_set).unwrap().f_measure);
    }
    println!("oracle mean F {:.4}", fs.iter().sum::<f64>() / fs.len() as f64);
}
