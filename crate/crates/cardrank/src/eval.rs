//! Exact-match evaluation and cross-validation.
//!
//! A predicted ranking counts only if it matches the logged ranking
//! element-for-element: same cards, same order, same length. TPR is the
//! matched fraction of satisfied pages, TNR the matched fraction of
//! reformulated pages, and the F-measure is the harmonic mean of TPR and
//! (1 - TNR): matching lists users were happy with is rewarded, matching
//! lists they reformulated away from is penalized. The ranker that replays
//! the log scores TPR = TNR = 1 and F = 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbt::{fit_gbt, GbtConfig, GbtModel};
use crate::labeling::{
    label_approx_pairwise, label_ctr, label_discounted_pointwise, label_listwise,
    label_movement_pointwise, label_naive_pointwise, AplSignRule, CardLabel, MovementConfig,
    PositivePolicy, Strategy,
};
use crate::ltl::{fit_ltl_per_query, FitConfig, LtlModel};
use crate::qpv::{chain_sessions, Qpv};
use crate::ranking::{
    build_training_set, rank_listwise, rank_pointwise, FeatureIndex, PredictedRanking,
    RankRequest, TrainingLabels,
};

/// Exact-match counts and ratios for one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tpr: f64,
    pub tnr: f64,
    pub f_measure: f64,
    pub n_positive: u64,
    pub n_negative: u64,
    pub matched_positive: u64,
    pub matched_negative: u64,
}

/// Harmonic mean of TPR and (1 - TNR); 0 when the denominator vanishes.
pub fn f_measure(tpr: f64, tnr: f64) -> f64 {
    let denom = tpr + (1.0 - tnr);
    if denom == 0.0 {
        0.0
    } else {
        2.0 * tpr * (1.0 - tnr) / denom
    }
}

impl MetricsReport {
    /// Assemble ratios from counts, defining 0/0 as 0.
    pub fn from_counts(
        matched_positive: u64,
        n_positive: u64,
        matched_negative: u64,
        n_negative: u64,
    ) -> MetricsReport {
        let ratio = |m: u64, n: u64| if n == 0 { 0.0 } else { m as f64 / n as f64 };
        let tpr = ratio(matched_positive, n_positive);
        let tnr = ratio(matched_negative, n_negative);
        MetricsReport {
            tpr,
            tnr,
            f_measure: f_measure(tpr, tnr),
            n_positive,
            n_negative,
            matched_positive,
            matched_negative,
        }
    }
}

/// Score predictions against the log. Every evaluation QPV must have a
/// prediction; a match is an element-for-element equal card tuple.
pub fn evaluate(
    predictions: &HashMap<String, PredictedRanking>,
    qpvs: &[Qpv],
) -> Result<MetricsReport> {
    let mut matched_positive = 0;
    let mut matched_negative = 0;
    let mut n_positive = 0;
    let mut n_negative = 0;
    for qpv in qpvs {
        let prediction = predictions
            .get(&qpv.qpv_id)
            .ok_or_else(|| Error::MissingPrediction(qpv.qpv_id.clone()))?;
        let matched = prediction.ranking == qpv.ranking();
        if qpv.reformulated {
            n_negative += 1;
            matched_negative += u64::from(matched);
        } else {
            n_positive += 1;
            matched_positive += u64::from(matched);
        }
    }
    Ok(MetricsReport::from_counts(
        matched_positive,
        n_positive,
        matched_negative,
        n_negative,
    ))
}

/// Fold assignment unit. Hashing the query term keeps every query's QPVs
/// (and therefore all its query-conditioned feature statistics) on one side
/// of each train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKey {
    #[default]
    ByQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub num_folds: usize,
    pub split_key: SplitKey,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            num_folds: 5,
            split_key: SplitKey::ByQuery,
            seed: 0,
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_folds < 2 {
            return Err(Error::InvalidConfig(format!(
                "cross-validation needs at least 2 folds, got {}",
                self.num_folds
            )));
        }
        Ok(())
    }
}

/// Stable FNV-1a hash; fold assignment must not depend on the hasher the
/// standard library ships this year.
fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut hash = 0xcbf29ce484222325u64 ^ seed.wrapping_mul(0x9e3779b97f4a7c15);
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// The fold a query term belongs to.
pub fn fold_of(query: &str, config: &CvConfig) -> usize {
    (fnv1a(query.as_bytes(), config.seed) % config.num_folds as u64) as usize
}

/// Per-strategy knobs for label derivation inside the driver.
#[derive(Debug, Clone)]
pub struct StrategyOptions {
    pub movement: MovementConfig,
    pub positives: PositivePolicy,
    pub apl_combine: bool,
    pub apl_sign_rule: AplSignRule,
    pub ltl_fit: FitConfig,
    /// Query-card judgments for the human strategy; per fold, only
    /// judgments for training-fold queries are used.
    pub human_judgments: Option<Vec<CardLabel>>,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            movement: MovementConfig::default(),
            positives: PositivePolicy::default(),
            apl_combine: true,
            apl_sign_rule: AplSignRule::default(),
            ltl_fit: FitConfig::default(),
            human_judgments: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub num_train_qpvs: u64,
    pub num_eval_qpvs: u64,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub mean_tpr: f64,
    pub std_tpr: f64,
    pub mean_tnr: f64,
    pub std_tnr: f64,
    pub mean_f_measure: f64,
    pub std_f_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub strategy: Strategy,
    pub folds: Vec<FoldReport>,
    pub summary: CvSummary,
    pub warnings: Vec<String>,
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Derive training labels for one strategy from training-fold QPVs.
///
/// Returns card labels for pointwise-path strategies, or `None` with the
/// listwise flag set for the listwise strategy (handled by the caller).
fn derive_card_labels(
    strategy: Strategy,
    train: &[Qpv],
    opts: &StrategyOptions,
) -> Result<Vec<CardLabel>> {
    match strategy {
        Strategy::Npl => {
            let pairs = chain_sessions(train)?;
            Ok(label_naive_pointwise(train, &pairs, opts.positives))
        }
        Strategy::Dpl => {
            let pairs = chain_sessions(train)?;
            Ok(label_discounted_pointwise(train, &pairs, opts.positives))
        }
        Strategy::Mpl => {
            let pairs = chain_sessions(train)?;
            Ok(label_movement_pointwise(&pairs, &opts.movement))
        }
        Strategy::Apl => Ok(label_approx_pairwise(train, opts.apl_combine, opts.apl_sign_rule)),
        Strategy::Ctr => Ok(label_ctr(train)),
        Strategy::Ltl => {
            let models = fit_ltl_per_query(train, &opts.ltl_fit)?;
            let by_query: BTreeMap<&str, &LtlModel> =
                models.iter().map(|m| (m.query.as_str(), m)).collect();
            let mut labels = Vec::new();
            for qpv in train {
                let model = by_query
                    .get(qpv.query.as_str())
                    .expect("every training query has a fitted model");
                labels.extend(model.qpv_labels(qpv)?.labels);
            }
            Ok(labels)
        }
        Strategy::Human => {
            let judgments = opts.human_judgments.as_ref().ok_or(Error::InvalidConfig(
                "the human strategy needs imported judgments".into(),
            ))?;
            let train_queries: BTreeSet<&str> = train.iter().map(|q| q.query.as_str()).collect();
            Ok(judgments
                .iter()
                .filter(|label| train_queries.contains(label.query.as_str()))
                .cloned()
                .collect())
        }
        Strategy::Ll => Err(Error::InvalidConfig(
            "listwise labels are not card labels".into(),
        )),
    }
}

/// Which prediction path a strategy uses.
fn is_listwise(strategy: Strategy) -> bool {
    strategy == Strategy::Ll
}

/// Train a ranker on training-fold QPVs for one strategy.
///
/// Duplicate feature rows are merged (weighted) before boosting; this is
/// exact for least-squares trees and keeps training sets near the number of
/// distinct (query, card) pairs instead of the number of labels.
pub fn train_strategy_model(
    strategy: Strategy,
    train: &[Qpv],
    index: &FeatureIndex,
    gbt_config: &GbtConfig,
    opts: &StrategyOptions,
) -> Result<GbtModel> {
    let dataset = if is_listwise(strategy) {
        let labels = label_listwise(train);
        build_training_set(&TrainingLabels::Listwise(&labels), index)?
    } else {
        let labels = derive_card_labels(strategy, train, opts)?;
        if labels.is_empty() {
            return Err(Error::EmptyInput("strategy produced no training labels"));
        }
        build_training_set(&TrainingLabels::Pointwise(&labels), index)?
    };
    fit_gbt(&dataset.compacted(), gbt_config)
}

/// Issue one prediction per QPV, drawing candidates from the cards the QPV
/// actually showed (the exact-match protocol compares against that list).
///
/// Listwise models are given the full-length permutations of the pool as
/// candidate lists: shorter lists can never exact-match the observed
/// ranking, and production positioning constraints restrict the ranking
/// space the same way.
pub fn predict_for_qpvs(
    model: &GbtModel,
    index: &FeatureIndex,
    qpvs: &[Qpv],
    listwise: bool,
) -> Result<HashMap<String, PredictedRanking>> {
    let predictions: Result<Vec<(String, PredictedRanking)>> = qpvs
        .par_iter()
        .map(|qpv| {
            let request = RankRequest::new(qpv.query.clone(), qpv.ranking());
            let prediction = if listwise {
                if request.candidate_cards.len() > crate::ranking::LISTWISE_ENUMERATION_CAP {
                    return Err(Error::ListwiseTooLarge {
                        num_cards: request.candidate_cards.len(),
                        cap: crate::ranking::LISTWISE_ENUMERATION_CAP,
                    });
                }
                let k = request.candidate_cards.len();
                let lists: Vec<Vec<String>> =
                    crate::ranking::enumerate_candidate_lists(&request.candidate_cards, k)
                        .into_iter()
                        .filter(|l| l.len() == k)
                        .collect();
                rank_listwise(model, index, &request, Some(&lists))?
            } else {
                rank_pointwise(model, index, &request)?
            };
            Ok((qpv.qpv_id.clone(), prediction))
        })
        .collect();
    Ok(predictions?.into_iter().collect())
}

/// Run k-fold cross-validation for one strategy.
///
/// Folds are assigned by hashing the query term, so no query appears in
/// both the training and evaluation side of a fold. Labels, the feature
/// index, and any learning-to-label models are built from training folds
/// only. Every held-out QPV is predicted over its own card pool and scored
/// by exact match.
pub fn cross_validate(
    qpvs: &[Qpv],
    strategy: Strategy,
    gbt_config: &GbtConfig,
    cv_config: &CvConfig,
    opts: &StrategyOptions,
) -> Result<CvReport> {
    cv_config.validate()?;
    if qpvs.is_empty() {
        return Err(Error::EmptyInput("cross-validation needs a non-empty log"));
    }

    let universe: BTreeSet<String> = qpvs
        .iter()
        .flat_map(|q| q.cards.iter().map(|c| c.card_type.clone()))
        .collect();
    let universe: Vec<String> = universe.into_iter().collect();

    let mut folds = Vec::with_capacity(cv_config.num_folds);
    let mut warnings = Vec::new();
    for fold in 0..cv_config.num_folds {
        let (train, eval): (Vec<Qpv>, Vec<Qpv>) = qpvs
            .iter()
            .cloned()
            .partition(|q| fold_of(&q.query, cv_config) != fold);
        if eval.is_empty() {
            warnings.push(format!("fold {fold}: no evaluation queries; skipped"));
            folds.push(FoldReport {
                fold,
                num_train_qpvs: train.len() as u64,
                num_eval_qpvs: 0,
                metrics: MetricsReport::from_counts(0, 0, 0, 0),
            });
            continue;
        }
        if train.is_empty() {
            return Err(Error::EmptyInput("a fold has no training queries"));
        }

        let index = FeatureIndex::build_with_universe(&train, universe.clone());
        let fold_gbt = GbtConfig {
            seed: gbt_config
                .seed
                .wrapping_add((fold as u64).wrapping_mul(0x9e3779b97f4a7c15)),
            ..*gbt_config
        };
        let model = train_strategy_model(strategy, &train, &index, &fold_gbt, opts)?;
        let predictions = predict_for_qpvs(&model, &index, &eval, is_listwise(strategy))?;
        let metrics = evaluate(&predictions, &eval)?;
        if metrics.n_positive == 0 {
            warnings.push(format!("fold {fold}: no positive QPVs; TPR reported as 0"));
        }
        if metrics.n_negative == 0 {
            warnings.push(format!("fold {fold}: no negative QPVs; TNR reported as 0"));
        }
        folds.push(FoldReport {
            fold,
            num_train_qpvs: train.len() as u64,
            num_eval_qpvs: eval.len() as u64,
            metrics,
        });
    }

    let tprs: Vec<f64> = folds.iter().map(|f| f.metrics.tpr).collect();
    let tnrs: Vec<f64> = folds.iter().map(|f| f.metrics.tnr).collect();
    let fs: Vec<f64> = folds.iter().map(|f| f.metrics.f_measure).collect();
    let (mean_tpr, std_tpr) = mean_and_std(&tprs);
    let (mean_tnr, std_tnr) = mean_and_std(&tnrs);
    let (mean_f_measure, std_f_measure) = mean_and_std(&fs);

    Ok(CvReport {
        strategy,
        folds,
        summary: CvSummary {
            mean_tpr,
            std_tpr,
            mean_tnr,
            std_tnr,
            mean_f_measure,
            std_f_measure,
        },
        warnings,
    })
}

/// One summary row per strategy, for side-by-side comparison tables.
pub fn write_summary_tsv<W: std::io::Write>(reports: &[CvReport], mut writer: W) -> Result<()> {
    writeln!(
        writer,
        "strategy\tmean_tpr\tmean_tnr\tmean_1_minus_tnr\tmean_f_measure\tstd_f_measure"
    )?;
    for report in reports {
        writeln!(
            writer,
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
            report.strategy,
            report.summary.mean_tpr,
            report.summary.mean_tnr,
            1.0 - report.summary.mean_tnr,
            report.summary.mean_f_measure,
            report.summary.std_f_measure
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::Strategy;
    use crate::qpv::test_fixtures::qpv;
    use proptest::prelude::*;

    fn replay_predictions(qpvs: &[Qpv]) -> HashMap<String, PredictedRanking> {
        qpvs.iter()
            .map(|q| {
                (
                    q.qpv_id.clone(),
                    PredictedRanking {
                        query: q.query.clone(),
                        ranking: q.ranking(),
                        score: 0.0,
                    },
                )
            })
            .collect()
    }

    fn mixed_log() -> Vec<Qpv> {
        vec![
            qpv("p1", "s1", 1, "q1", false, &["a", "b"]),
            qpv("p2", "s2", 1, "q1", false, &["b", "a"]),
            qpv("n1", "s3", 1, "q2", true, &["a", "b"]),
            qpv("n2", "s4", 1, "q2", true, &["b", "a"]),
        ]
    }

    #[test]
    fn replay_predictor_has_unit_ratios_and_zero_f() {
        let qpvs = mixed_log();
        let metrics = evaluate(&replay_predictions(&qpvs), &qpvs).unwrap();
        assert_eq!(metrics.tpr, 1.0);
        assert_eq!(metrics.tnr, 1.0);
        assert_eq!(metrics.f_measure, 0.0);
    }

    #[test]
    fn matching_nothing_gives_all_zeros() {
        let qpvs = mixed_log();
        let mut predictions = replay_predictions(&qpvs);
        for p in predictions.values_mut() {
            p.ranking = vec!["zzz".into()];
        }
        let metrics = evaluate(&predictions, &qpvs).unwrap();
        assert_eq!(metrics.tpr, 0.0);
        assert_eq!(metrics.tnr, 0.0);
        assert_eq!(metrics.f_measure, 0.0);
    }

    #[test]
    fn hand_case_half_positive_quarter_negative() {
        // 2 of 4 positives matched, 1 of 4 negatives matched.
        let metrics = MetricsReport::from_counts(2, 4, 1, 4);
        assert_eq!(metrics.tpr, 0.5);
        assert_eq!(metrics.tnr, 0.25);
        assert_eq!(metrics.f_measure, 0.6);
    }

    #[test]
    fn length_mismatch_is_not_a_match() {
        let qpvs = vec![qpv("p1", "s1", 1, "q", false, &["a", "b"])];
        let mut predictions = replay_predictions(&qpvs);
        predictions.get_mut("p1").unwrap().ranking = vec!["a".into()];
        let metrics = evaluate(&predictions, &qpvs).unwrap();
        assert_eq!(metrics.matched_positive, 0);
    }

    #[test]
    fn missing_prediction_names_the_qpv() {
        let qpvs = mixed_log();
        let mut predictions = replay_predictions(&qpvs);
        predictions.remove("n2");
        match evaluate(&predictions, &qpvs).unwrap_err() {
            Error::MissingPrediction(id) => assert_eq!(id, "n2"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn zero_denominators_report_zero() {
        let metrics = MetricsReport::from_counts(0, 0, 0, 0);
        assert_eq!(metrics.tpr, 0.0);
        assert_eq!(metrics.tnr, 0.0);
        assert_eq!(metrics.f_measure, 0.0);
    }

    proptest! {
        #[test]
        fn f_is_zero_whenever_tnr_is_one(tpr in 0.0f64..=1.0) {
            prop_assert_eq!(f_measure(tpr, 1.0), 0.0);
        }

        #[test]
        fn f_moves_the_right_way(
            matched_pos in 0u64..50,
            n_pos in 50u64..100,
            matched_neg in 0u64..50,
            n_neg in 50u64..100,
        ) {
            let base = MetricsReport::from_counts(matched_pos, n_pos, matched_neg, n_neg);
            let more_pos = MetricsReport::from_counts(matched_pos + 1, n_pos, matched_neg, n_neg);
            let more_neg = MetricsReport::from_counts(matched_pos, n_pos, matched_neg + 1, n_neg);
            prop_assert!(more_pos.f_measure >= base.f_measure - 1e-15);
            prop_assert!(more_neg.f_measure <= base.f_measure + 1e-15);
        }
    }

    #[test]
    fn fold_assignment_is_deterministic_and_partitioning() {
        let config = CvConfig { num_folds: 5, seed: 7, ..CvConfig::default() };
        for q in ["alpha", "beta", "gamma", "delta"] {
            let first = fold_of(q, &config);
            assert_eq!(first, fold_of(q, &config));
            assert!(first < 5);
        }
        let reseeded = CvConfig { seed: 8, ..config };
        // Different seeds reshuffle at least one of these queries.
        assert!(
            ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
                .iter()
                .any(|q| fold_of(q, &config) != fold_of(q, &reseeded))
        );
    }

    fn synthetic_cv_log() -> Vec<Qpv> {
        // Enough queries that every fold has train and eval data, with
        // reformulation chains so movement labels exist everywhere.
        let mut qpvs = Vec::new();
        for qi in 0..25 {
            let query = format!("query{qi}");
            let cards: &[&str] = if qi % 2 == 0 { &["a", "b"] } else { &["b", "c"] };
            let flipped: &[&str] = if qi % 2 == 0 { &["b", "a"] } else { &["c", "b"] };
            for si in 0..2 {
                let session = format!("s{qi}-{si}");
                if si == 0 {
                    qpvs.push(qpv(&format!("p{qi}-{si}"), &session, 1, &query, false, cards));
                } else {
                    qpvs.push(qpv(&format!("n{qi}-{si}"), &session, 1, &query, true, flipped));
                    qpvs.push(qpv(&format!("p{qi}-{si}"), &session, 2, &query, false, cards));
                }
            }
        }
        qpvs
    }

    #[test]
    fn cross_validation_splits_queries_disjointly() {
        let qpvs = synthetic_cv_log();
        let cv = CvConfig { num_folds: 5, seed: 3, ..CvConfig::default() };
        for fold in 0..5 {
            let (train, eval): (Vec<Qpv>, Vec<Qpv>) = qpvs
                .iter()
                .cloned()
                .partition(|q| fold_of(&q.query, &cv) != fold);
            let train_queries: BTreeSet<&str> = train.iter().map(|q| q.query.as_str()).collect();
            for q in &eval {
                assert!(!train_queries.contains(q.query.as_str()));
            }
        }
    }

    #[test]
    fn cross_validation_is_deterministic_and_summary_is_the_mean() {
        let qpvs = synthetic_cv_log();
        let gbt = GbtConfig { num_trees: 10, min_samples_per_leaf: 1, seed: 2, ..GbtConfig::default() };
        let cv = CvConfig { num_folds: 4, seed: 11, ..CvConfig::default() };
        let opts = StrategyOptions::default();
        let a = cross_validate(&qpvs, Strategy::Npl, &gbt, &cv, &opts).unwrap();
        let b = cross_validate(&qpvs, Strategy::Npl, &gbt, &cv, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.folds.len(), 4);
        let mean: f64 =
            a.folds.iter().map(|f| f.metrics.f_measure).sum::<f64>() / a.folds.len() as f64;
        assert!((a.summary.mean_f_measure - mean).abs() < 1e-12);
    }

    #[test]
    fn human_strategy_requires_judgments() {
        let qpvs = synthetic_cv_log();
        let gbt = GbtConfig { num_trees: 3, min_samples_per_leaf: 1, ..GbtConfig::default() };
        let cv = CvConfig { num_folds: 3, ..CvConfig::default() };
        let err = cross_validate(&qpvs, Strategy::Human, &gbt, &cv, &StrategyOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("judgments"));
    }

    #[test]
    fn all_strategies_run_end_to_end_on_a_small_log() {
        let qpvs = synthetic_cv_log();
        let gbt = GbtConfig { num_trees: 5, min_samples_per_leaf: 1, seed: 1, ..GbtConfig::default() };
        let cv = CvConfig { num_folds: 3, seed: 5, ..CvConfig::default() };
        let judgments: Vec<CardLabel> = (0..25)
            .map(|qi| CardLabel {
                qpv_id: String::new(),
                query: format!("query{qi}"),
                card_type: if qi % 2 == 0 { "a".into() } else { "b".into() },
                label: f64::from(qi % 5) - 2.0,
                strategy: Strategy::Human,
            })
            .collect();
        let opts = StrategyOptions {
            human_judgments: Some(judgments),
            ..StrategyOptions::default()
        };
        for strategy in Strategy::ALL {
            let report = cross_validate(&qpvs, strategy, &gbt, &cv, &opts).unwrap();
            assert_eq!(report.folds.len(), 3, "{strategy}");
            for fold in &report.folds {
                assert!(fold.metrics.tpr >= 0.0 && fold.metrics.tpr <= 1.0);
            }
        }
    }
}
