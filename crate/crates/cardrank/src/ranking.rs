//! Feature extraction from logs, training-set assembly per labeling
//! scenario, and ranked-list prediction.
//!
//! The feature schema is derived entirely from the log: per-(query, card)
//! engagement rates, query frequency, a position prior, the card one-hot
//! block, and a global card CTR. Rate features carry add-one smoothing on
//! the denominator so cold pairs degrade to zeros instead of dividing by
//! zero. An index must be built from training QPVs only; evaluation folds
//! never feed it.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbt::{Dataset, GbtModel};
use crate::labeling::{rank_discount, CardLabel, ListLabel, PairLabel};
use crate::qpv::Qpv;

/// Scalar slots preceding the one-hot block (one more, the global card
/// CTR, follows it). Vector width is `6 + |card universe|`.
const QUERY_SLOTS: usize = 5;

/// Names of the schema slots, in vector order.
pub fn schema_slot_names(universe: &[String]) -> Vec<String> {
    let mut names = vec![
        "qc_link_ctr".to_string(),
        "qc_view_rate".to_string(),
        "qc_click_rate".to_string(),
        "query_log_freq".to_string(),
        "qc_position_prior".to_string(),
    ];
    names.extend(universe.iter().map(|c| format!("onehot_{c}")));
    names.push("global_link_ctr".to_string());
    names
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
struct QcStats {
    shown: u64,
    viewed: u64,
    clicked: u64,
    links: u64,
    link_clicks: u64,
    rank_sum: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
struct CardStats {
    links: u64,
    link_clicks: u64,
}

/// Aggregated log statistics backing the feature schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureIndex {
    universe: Vec<String>,
    per_query_card: BTreeMap<String, BTreeMap<String, QcStats>>,
    per_query_qpvs: BTreeMap<String, u64>,
    per_card: BTreeMap<String, CardStats>,
}

impl FeatureIndex {
    /// Build from training QPVs; the card universe is what the training log
    /// shows.
    pub fn build(qpvs: &[Qpv]) -> FeatureIndex {
        let universe: BTreeSet<String> = qpvs
            .iter()
            .flat_map(|q| q.cards.iter().map(|c| c.card_type.clone()))
            .collect();
        Self::build_with_universe(qpvs, universe.into_iter().collect())
    }

    /// Build from training QPVs with an explicit card universe. The
    /// cross-validation driver passes the whole log's card vocabulary here
    /// so held-out folds can be scored; all statistics still come from the
    /// training QPVs alone.
    pub fn build_with_universe(qpvs: &[Qpv], universe: Vec<String>) -> FeatureIndex {
        let mut universe = universe;
        universe.sort();
        universe.dedup();
        let mut index = FeatureIndex {
            universe,
            per_query_card: BTreeMap::new(),
            per_query_qpvs: BTreeMap::new(),
            per_card: BTreeMap::new(),
        };
        for qpv in qpvs {
            *index.per_query_qpvs.entry(qpv.query.clone()).or_default() += 1;
            for card in &qpv.cards {
                let qc = index
                    .per_query_card
                    .entry(qpv.query.clone())
                    .or_default()
                    .entry(card.card_type.clone())
                    .or_default();
                qc.shown += 1;
                qc.viewed += u64::from(card.viewed);
                qc.clicked += u64::from(card.clicked);
                qc.links += u64::from(card.num_links);
                qc.link_clicks += u64::from(card.num_link_clicks);
                qc.rank_sum += u64::from(card.rank);

                let global = index.per_card.entry(card.card_type.clone()).or_default();
                global.links += u64::from(card.num_links);
                global.link_clicks += u64::from(card.num_link_clicks);
            }
        }
        index
    }

    /// Card types known to the index, sorted.
    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn feature_width(&self) -> usize {
        QUERY_SLOTS + self.universe.len() + 1
    }

    /// Raw (query, card) counters: shown, viewed, clicked, links,
    /// link_clicks, rank_sum. Zeros for unseen pairs.
    pub fn query_card_counts(&self, query: &str, card_type: &str) -> (u64, u64, u64, u64, u64, u64) {
        let qc = self
            .per_query_card
            .get(query)
            .and_then(|m| m.get(card_type))
            .copied()
            .unwrap_or_default();
        (qc.shown, qc.viewed, qc.clicked, qc.links, qc.link_clicks, qc.rank_sum)
    }

    /// Number of training QPVs for a query.
    pub fn query_count(&self, query: &str) -> u64 {
        self.per_query_qpvs.get(query).copied().unwrap_or(0)
    }

    /// Raw global card counters: links, link_clicks.
    pub fn card_counts(&self, card_type: &str) -> (u64, u64) {
        let c = self.per_card.get(card_type).copied().unwrap_or_default();
        (c.links, c.link_clicks)
    }

    /// Extract the feature vector for a (query, card) pair. Unseen pairs
    /// produce smoothed defaults (zeros) plus the card one-hot; a card type
    /// outside the universe is an error.
    pub fn extract(&self, query: &str, card_type: &str) -> Result<Vec<f64>> {
        let slot = self
            .universe
            .binary_search_by(|c| c.as_str().cmp(card_type))
            .map_err(|_| Error::UnknownCard(card_type.to_string()))?;
        let qc = self
            .per_query_card
            .get(query)
            .and_then(|m| m.get(card_type))
            .copied()
            .unwrap_or_default();
        let global = self.per_card.get(card_type).copied().unwrap_or_default();

        let mut features = Vec::with_capacity(self.feature_width());
        features.push(qc.link_clicks as f64 / (qc.links + 1) as f64);
        features.push(qc.viewed as f64 / (qc.shown + 1) as f64);
        features.push(qc.clicked as f64 / (qc.shown + 1) as f64);
        features.push((1.0 + self.query_count(query) as f64).ln());
        features.push(qc.rank_sum as f64 / (qc.shown + 1) as f64);
        for i in 0..self.universe.len() {
            features.push(if i == slot { 1.0 } else { 0.0 });
        }
        features.push(global.link_clicks as f64 / (global.links + 1) as f64);
        Ok(features)
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn load<R: std::io::Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

/// Dump the feature vectors of every (query, card) pair the index has seen,
/// as a TSV whose header names the schema slots.
pub fn write_feature_dump<W: Write>(index: &FeatureIndex, mut writer: W) -> Result<()> {
    let names = schema_slot_names(index.universe());
    writeln!(writer, "query\tcard_type\t{}", names.join("\t"))?;
    for (query, cards) in &index.per_query_card {
        for card_type in cards.keys() {
            let features = index.extract(query, card_type)?;
            let rendered: Vec<String> = features.iter().map(|v| format!("{v}")).collect();
            writeln!(writer, "{query}\t{card_type}\t{}", rendered.join("\t"))?;
        }
    }
    Ok(())
}

/// Labels for one training-set assembly call; the variant selects the
/// scenario.
pub enum TrainingLabels<'a> {
    Pointwise(&'a [CardLabel]),
    Pairwise(&'a [PairLabel]),
    Listwise(&'a [ListLabel]),
}

/// Assemble a regression dataset from labels.
///
/// Pointwise: one row per card label. Pairwise: one row per pair label with
/// the feature difference (preferred minus other). Listwise: one row per
/// list label with the position-discounted sum of per-card vectors
/// (1/ln(1+rank) weights). Pointwise labels must all come from one strategy.
pub fn build_training_set(labels: &TrainingLabels<'_>, index: &FeatureIndex) -> Result<Dataset> {
    let mut features = Vec::new();
    let mut targets = Vec::new();
    match labels {
        TrainingLabels::Pointwise(cards) => {
            if let Some(first) = cards.first() {
                if let Some(odd) = cards.iter().find(|l| l.strategy != first.strategy) {
                    return Err(Error::MixedStrategies {
                        first: first.strategy.to_string(),
                        second: odd.strategy.to_string(),
                    });
                }
            }
            for label in *cards {
                features.push(index.extract(&label.query, &label.card_type)?);
                targets.push(label.label);
            }
        }
        TrainingLabels::Pairwise(pairs) => {
            for pair in *pairs {
                let preferred = index.extract(&pair.query, &pair.preferred)?;
                let other = index.extract(&pair.query, &pair.other)?;
                let row: Vec<f64> = preferred
                    .iter()
                    .zip(&other)
                    .map(|(a, b)| a - b)
                    .collect();
                features.push(row);
                targets.push(f64::from(pair.label));
            }
        }
        TrainingLabels::Listwise(lists) => {
            for list in *lists {
                features.push(list_features(index, &list.query, &list.ranking)?);
                targets.push(f64::from(list.label));
            }
        }
    }
    Dataset::new(features, targets)
}

/// Position-discounted feature sum for a whole ranking.
pub fn list_features(index: &FeatureIndex, query: &str, ranking: &[String]) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; index.feature_width()];
    for (pos, card_type) in ranking.iter().enumerate() {
        let card = index.extract(query, card_type)?;
        let discount = rank_discount(pos as u32 + 1);
        for (s, v) in sum.iter_mut().zip(&card) {
            *s += discount * v;
        }
    }
    Ok(sum)
}

/// A ranking request: the post-relevance-filter candidate pool for a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRequest {
    pub query: String,
    pub candidate_cards: BTreeSet<String>,
    pub max_list_size: usize,
}

impl RankRequest {
    pub fn new(query: impl Into<String>, candidates: impl IntoIterator<Item = String>) -> Self {
        let candidate_cards: BTreeSet<String> = candidates.into_iter().collect();
        let max_list_size = candidate_cards.len();
        RankRequest {
            query: query.into(),
            candidate_cards,
            max_list_size,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.candidate_cards.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        if self.candidate_cards.len() > 8 {
            return Err(Error::InvalidConfig(format!(
                "candidate pool holds {} cards; the post-filter pool is capped at 8",
                self.candidate_cards.len()
            )));
        }
        Ok(())
    }
}

/// A predicted ranked list with its model score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedRanking {
    pub query: String,
    pub ranking: Vec<String>,
    pub score: f64,
}

/// Rank candidates by per-card model score, descending; ties break by
/// ascending card type; the list is truncated to `max_list_size`. The
/// reported score is the sum over the emitted cards.
///
/// This is the prediction path shared by all pointwise-label models
/// (naive/discounted/movement pointwise, combined approximated pairwise,
/// CTR, human, and learning-to-label).
pub fn rank_pointwise(
    model: &GbtModel,
    index: &FeatureIndex,
    request: &RankRequest,
) -> Result<PredictedRanking> {
    request.validate()?;
    let mut scored: Vec<(String, f64)> = Vec::with_capacity(request.candidate_cards.len());
    for card in &request.candidate_cards {
        let score = model.predict(&index.extract(&request.query, card)?)?;
        scored.push((card.clone(), score));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(request.max_list_size);
    Ok(PredictedRanking {
        query: request.query.clone(),
        ranking: scored.iter().map(|(c, _)| c.clone()).collect(),
        score: scored.iter().map(|(_, s)| s).sum(),
    })
}

/// Full enumeration is capped at this pool size; larger pools need
/// explicit candidate lists.
pub const LISTWISE_ENUMERATION_CAP: usize = 6;

/// All permutations of all non-empty subsets of `cards`, up to `max_len`,
/// in deterministic lexicographic-by-construction order.
pub fn enumerate_candidate_lists(cards: &BTreeSet<String>, max_len: usize) -> Vec<Vec<String>> {
    fn recurse(
        cards: &[&String],
        used: &mut [bool],
        current: &mut Vec<String>,
        max_len: usize,
        lists: &mut Vec<Vec<String>>,
    ) {
        if !current.is_empty() {
            lists.push(current.clone());
        }
        if current.len() == max_len {
            return;
        }
        for i in 0..cards.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            current.push(cards[i].clone());
            recurse(cards, used, current, max_len, lists);
            current.pop();
            used[i] = false;
        }
    }
    let cards: Vec<&String> = cards.iter().collect();
    let mut lists = Vec::new();
    let mut used = vec![false; cards.len()];
    recurse(&cards, &mut used, &mut Vec::new(), max_len, &mut lists);
    lists
}

/// Score one candidate list under a listwise-label model.
pub fn score_list(
    model: &GbtModel,
    index: &FeatureIndex,
    query: &str,
    ranking: &[String],
) -> Result<f64> {
    model.predict(&list_features(index, query, ranking)?)
}

/// Pick the best-scoring ranking for a listwise-label model.
///
/// With `candidate_lists` the given lists are scored exactly as supplied;
/// otherwise every permutation of every non-empty candidate subset up to
/// `max_list_size` is enumerated, which is only feasible for small pools.
/// Ties break lexicographically by card tuple.
pub fn rank_listwise(
    model: &GbtModel,
    index: &FeatureIndex,
    request: &RankRequest,
    candidate_lists: Option<&[Vec<String>]>,
) -> Result<PredictedRanking> {
    request.validate()?;
    let enumerated;
    let lists: &[Vec<String>] = match candidate_lists {
        Some(lists) if !lists.is_empty() => lists,
        _ => {
            if request.candidate_cards.len() > LISTWISE_ENUMERATION_CAP {
                return Err(Error::ListwiseTooLarge {
                    num_cards: request.candidate_cards.len(),
                    cap: LISTWISE_ENUMERATION_CAP,
                });
            }
            enumerated =
                enumerate_candidate_lists(&request.candidate_cards, request.max_list_size);
            &enumerated
        }
    };
    let mut best: Option<(&Vec<String>, f64)> = None;
    for list in lists {
        let score = score_list(model, index, &request.query, list)?;
        let better = match &best {
            None => true,
            Some((bl, bs)) => score > *bs || (score == *bs && list.as_slice() < bl.as_slice()),
        };
        if better {
            best = Some((list, score));
        }
    }
    let (ranking, score) = best.ok_or(Error::EmptyCandidates)?;
    Ok(PredictedRanking {
        query: request.query.clone(),
        ranking: ranking.clone(),
        score,
    })
}

/// Read a candidate-list file: one JSON array of card types per line.
pub fn read_candidate_lists<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut lists = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        lists.push(serde_json::from_str(&line).map_err(|e| Error::ParseLine {
            line: idx + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(lists)
}
