//! Synthetic QPV log generator with known latent relevance.
//!
//! The generator encodes the working assumption behind reformulation-based
//! labeling as a testable mechanism: the better the shown ranking (measured
//! as a position-discounted sum of true relevance), the less likely the
//! user is to reformulate. Each session draws a query, shows a page, draws
//! views by position bias and clicks by relevance on link-bearing cards,
//! then draws dissatisfaction from a logistic in the ranking quality.
//! Dissatisfied users either reformulate (the next page moves one adjacent
//! transposition toward the ideal order, possibly swapping a better card
//! in) or abandon the session, leaving a trailing negative QPV.
//!
//! The sidecar [`GroundTruth`] makes end-to-end claims checkable at desk
//! scale: an oracle that sorts by true relevance upper-bounds every
//! learned ranker.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::prelude::IndexedRandom;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::rank_discount;
use crate::qpv::{CardObservation, Qpv};
use crate::ranking::PredictedRanking;

/// Probability that a page shows the top-relevance card subset rather than
/// a random one.
pub const SUBSET_FIDELITY: f64 = 0.85;
/// Probability that the shown subset is in ideal order rather than shuffled.
pub const ORDER_FIDELITY: f64 = 0.55;
/// Probability that a reformulated page also swaps the worst card for the
/// best missing one.
pub const SWAP_IN_PROB: f64 = 0.5;
/// Probability that a dissatisfied user abandons instead of reformulating.
pub const ABANDON_PROB: f64 = 0.15;
/// Hard cap on QPVs per session.
pub const MAX_CHAIN: usize = 5;
/// Weight of the card-global quality component in latent relevance; the
/// remainder is per-(query, card) noise.
pub const GLOBAL_QUALITY_MIX: f64 = 0.85;
/// Every other card type is link-less (weather-style): it can be viewed
/// and satisfy, but never earns link clicks.
pub const LINKLESS_STRIDE: usize = 2;

/// Per-click response model: P(click | viewed, links shown) =
/// `scale` x relevance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickModel {
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub num_queries: usize,
    pub num_card_types: usize,
    pub num_sessions: usize,
    /// Page-size distribution; weights must sum to 1.
    pub cards_per_page_distribution: BTreeMap<usize, f64>,
    /// Sharpness of latent relevance draws: values above 1 push relevance
    /// toward 0/1, making card distinctions crisper.
    pub relevance_concentration: f64,
    /// Steepness of the logistic linking ranking quality to satisfaction.
    pub reformulation_steepness: f64,
    /// Per-rank view probabilities; must cover the largest page size.
    pub position_bias: Vec<f64>,
    pub click_model: ClickModel,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            num_queries: 40,
            num_card_types: 12,
            num_sessions: 2_000,
            cards_per_page_distribution: BTreeMap::from([(2, 0.695), (3, 0.291), (4, 0.014)]),
            relevance_concentration: 2.0,
            reformulation_steepness: 1.0,
            position_bias: vec![0.95, 0.80, 0.65, 0.50, 0.40, 0.32],
            click_model: ClickModel { scale: 0.65 },
            seed: 7,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfig(what));
        if self.num_queries == 0 || self.num_card_types == 0 || self.num_sessions == 0 {
            return bad("world needs at least one query, card type, and session".into());
        }
        if self.cards_per_page_distribution.is_empty() {
            return bad("cards_per_page_distribution is empty".into());
        }
        let weight_sum: f64 = self.cards_per_page_distribution.values().sum();
        if (weight_sum - 1.0).abs() > 1e-6 {
            return bad(format!("page-size weights sum to {weight_sum}, expected 1"));
        }
        if self.cards_per_page_distribution.values().any(|&w| w < 0.0) {
            return bad("page-size weights must be non-negative".into());
        }
        let max_page = *self.cards_per_page_distribution.keys().max().unwrap();
        if max_page == 0 {
            return bad("page sizes must be positive".into());
        }
        if max_page > self.num_card_types {
            return bad(format!(
                "largest page size {max_page} exceeds the {} card types",
                self.num_card_types
            ));
        }
        if max_page > self.position_bias.len() {
            return bad(format!(
                "position_bias covers {} ranks but pages go up to {max_page}",
                self.position_bias.len()
            ));
        }
        if self.position_bias.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("position_bias entries must be probabilities".into());
        }
        if !(self.relevance_concentration > 0.0) || !(self.reformulation_steepness > 0.0) {
            return bad("concentration and steepness must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.click_model.scale) {
            return bad("click model scale must be a probability".into());
        }
        Ok(())
    }

    fn query_name(&self, i: usize) -> String {
        format!("q_{i:04}")
    }

    fn card_name(&self, i: usize) -> String {
        format!("card_{i:03}")
    }

    /// Links shown per card type; every `LINKLESS_STRIDE`-th card has none.
    pub fn links_for_card(&self, card_index: usize) -> u32 {
        if card_index % LINKLESS_STRIDE == LINKLESS_STRIDE - 1 {
            0
        } else {
            4 + (card_index % 4) as u32
        }
    }
}

/// Latent state for one query: relevance per card and the ideal ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTruth {
    pub query: String,
    pub relevance: BTreeMap<String, f64>,
    pub ideal_ranking: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub queries: BTreeMap<String, QueryTruth>,
}

impl GroundTruth {
    pub fn relevance(&self, query: &str, card_type: &str) -> Option<f64> {
        self.queries.get(query)?.relevance.get(card_type).copied()
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        for truth in self.queries.values() {
            serde_json::to_writer(&mut writer, truth)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<GroundTruth> {
        let mut queries = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let truth: QueryTruth = serde_json::from_str(&line).map_err(|e| Error::ParseLine {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            queries.insert(truth.query.clone(), truth);
        }
        Ok(GroundTruth { queries })
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Push `x` toward 0/1 for gamma > 1, identity at gamma = 1.
fn sharpen(x: f64, gamma: f64) -> f64 {
    let a = x.powf(gamma);
    let b = (1.0 - x).powf(gamma);
    a / (a + b)
}

/// Position-discounted true-relevance value of a shown list; the quality
/// signal driving the satisfaction draw.
pub fn shown_quality(truth: &QueryTruth, ranking: &[String]) -> f64 {
    ranking
        .iter()
        .enumerate()
        .map(|(pos, card)| truth.relevance[card] * rank_discount(pos as u32 + 1))
        .sum()
}

/// Dissatisfaction probability for a shown quality value.
pub fn dissatisfaction_probability(quality: f64, steepness: f64) -> f64 {
    1.0 / (1.0 + (steepness * quality).exp())
}

fn build_truth(config: &WorldConfig) -> GroundTruth {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(config.seed ^ 0x57_4f52_4c44)); // "WORLD"
    // Global card quality: evenly spaced values in a seeded assignment.
    let mut order: Vec<usize> = (0..config.num_card_types).collect();
    order.shuffle(&mut rng);
    let mut quality = vec![0.0; config.num_card_types];
    for (slot, &card) in order.iter().enumerate() {
        quality[card] = 0.05
            + 0.9 * slot as f64 / (config.num_card_types.saturating_sub(1).max(1)) as f64;
    }

    let mut queries = BTreeMap::new();
    for qi in 0..config.num_queries {
        let query = config.query_name(qi);
        let mut relevance = BTreeMap::new();
        for ci in 0..config.num_card_types {
            let noise: f64 = rng.random();
            let mixed = GLOBAL_QUALITY_MIX * quality[ci] + (1.0 - GLOBAL_QUALITY_MIX) * noise;
            relevance.insert(
                config.card_name(ci),
                sharpen(mixed, config.relevance_concentration),
            );
        }
        let mut ideal: Vec<String> = relevance.keys().cloned().collect();
        ideal.sort_by(|a, b| {
            relevance[b]
                .total_cmp(&relevance[a])
                .then_with(|| a.cmp(b))
        });
        queries.insert(
            query.clone(),
            QueryTruth {
                query,
                relevance,
                ideal_ranking: ideal,
            },
        );
    }
    GroundTruth { queries }
}

/// One adjacent transposition toward the ideal order (a uniformly chosen
/// out-of-order neighbor pair), plus an optional swap-in of the best
/// missing card for the worst shown one.
fn improve_ranking(
    ranking: &[String],
    truth: &QueryTruth,
    swap_in: bool,
    universe: &[String],
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let mut next: Vec<String> = ranking.to_vec();
    let rel = |c: &String| truth.relevance[c];
    let inversions: Vec<usize> = next
        .windows(2)
        .enumerate()
        .filter(|(_, w)| rel(&w[1]) > rel(&w[0]))
        .map(|(i, _)| i)
        .collect();
    if let Some(&i) = inversions.as_slice().choose(rng) {
        next.swap(i, i + 1);
    }
    if swap_in {
        let shown: BTreeSet<&String> = next.iter().collect();
        let best_missing = universe
            .iter()
            .filter(|c| !shown.contains(c))
            .max_by(|a, b| rel(a).total_cmp(&rel(b)).then_with(|| b.cmp(a)));
        if let Some(candidate) = best_missing {
            let (worst_pos, _) = next
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| rel(a).total_cmp(&rel(b)).then_with(|| b.cmp(a)))
                .expect("ranking is non-empty");
            if rel(candidate) > rel(&next[worst_pos]) {
                next[worst_pos] = candidate.clone();
            }
        }
    }
    next
}

fn draw_page_size(config: &WorldConfig, rng: &mut ChaCha8Rng) -> usize {
    let roll: f64 = rng.random();
    let mut acc = 0.0;
    for (&size, &weight) in &config.cards_per_page_distribution {
        acc += weight;
        if roll < acc {
            return size;
        }
    }
    *config.cards_per_page_distribution.keys().next_back().unwrap()
}

fn draw_first_ranking(
    config: &WorldConfig,
    truth: &QueryTruth,
    universe: &[String],
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let size = draw_page_size(config, rng);
    let mut subset: Vec<String> = if rng.random::<f64>() < SUBSET_FIDELITY {
        truth.ideal_ranking[..size].to_vec()
    } else {
        universe
            .choose_multiple(rng, size)
            .cloned()
            .collect()
    };
    if rng.random::<f64>() < ORDER_FIDELITY {
        subset.sort_by(|a, b| {
            truth.relevance[b]
                .total_cmp(&truth.relevance[a])
                .then_with(|| a.cmp(b))
        });
    } else {
        subset.shuffle(rng);
    }
    subset
}

fn observe_cards(
    config: &WorldConfig,
    truth: &QueryTruth,
    ranking: &[String],
    card_indices: &BTreeMap<String, usize>,
    rng: &mut ChaCha8Rng,
) -> Vec<CardObservation> {
    ranking
        .iter()
        .enumerate()
        .map(|(pos, card_type)| {
            let viewed = rng.random::<f64>() < config.position_bias[pos];
            let num_links = config.links_for_card(card_indices[card_type]);
            let clicked = viewed
                && num_links > 0
                && rng.random::<f64>() < config.click_model.scale * truth.relevance[card_type];
            let num_link_clicks = if clicked {
                let mut extra = 0;
                for _ in 1..num_links {
                    if rng.random::<f64>() < 0.15 {
                        extra += 1;
                    }
                }
                1 + extra
            } else {
                0
            };
            CardObservation {
                card_type: card_type.clone(),
                rank: pos as u32 + 1,
                viewed,
                clicked,
                num_links,
                num_link_clicks,
            }
        })
        .collect()
}

fn generate_session(
    config: &WorldConfig,
    truth: &GroundTruth,
    universe: &[String],
    card_indices: &BTreeMap<String, usize>,
    session: usize,
) -> Vec<Qpv> {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(
        splitmix64(config.seed ^ 0x5345_5353) ^ session as u64,
    ));
    let session_id = format!("s{session:06}");
    let query_index = rng.random_range(0..config.num_queries);
    let query = config.query_name(query_index);
    let query_truth = &truth.queries[&query];

    let mut qpvs = Vec::new();
    let mut ranking = draw_first_ranking(config, query_truth, universe, &mut rng);
    for step in 0..MAX_CHAIN {
        let cards = observe_cards(config, query_truth, &ranking, card_indices, &mut rng);
        let quality = shown_quality(query_truth, &ranking);
        let dissatisfied = rng.random::<f64>()
            < dissatisfaction_probability(quality, config.reformulation_steepness);
        let last_step = step == MAX_CHAIN - 1;
        let abandons = dissatisfied && (last_step || rng.random::<f64>() < ABANDON_PROB);
        qpvs.push(Qpv {
            qpv_id: format!("{session_id}-{step}"),
            session_id: session_id.clone(),
            timestamp_ms: 1_600_000_000_000 + session as i64 * 60_000 + step as i64 * 5_000,
            query: query.clone(),
            reformulated: dissatisfied,
            cards,
        });
        if !dissatisfied || abandons {
            break;
        }
        let swap_in = rng.random::<f64>() < SWAP_IN_PROB;
        ranking = improve_ranking(&ranking, query_truth, swap_in, universe, &mut rng);
    }
    qpvs
}

/// Generate a log and its ground truth. Deterministic in `config.seed`;
/// sessions are generated in parallel from derived sub-seeds and emitted in
/// canonical (session id, timestamp) order.
pub fn generate_log(config: &WorldConfig) -> Result<(Vec<Qpv>, GroundTruth)> {
    config.validate()?;
    let truth = build_truth(config);
    let universe: Vec<String> = (0..config.num_card_types)
        .map(|i| config.card_name(i))
        .collect();
    let card_indices: BTreeMap<String, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();

    let qpvs: Vec<Qpv> = (0..config.num_sessions)
        .into_par_iter()
        .map(|session| generate_session(config, &truth, &universe, &card_indices, session))
        .flatten()
        .collect();
    Ok((qpvs, truth))
}

/// Rank a candidate pool by true relevance, descending, ties lexicographic.
pub fn oracle_ranking(
    truth: &GroundTruth,
    query: &str,
    candidate_cards: &BTreeSet<String>,
) -> Result<PredictedRanking> {
    let query_truth = truth
        .queries
        .get(query)
        .ok_or_else(|| Error::UnknownQuery(query.to_string()))?;
    let mut ranking: Vec<String> = candidate_cards.iter().cloned().collect();
    ranking.sort_by(|a, b| {
        let ra = query_truth.relevance.get(a).copied().unwrap_or(0.0);
        let rb = query_truth.relevance.get(b).copied().unwrap_or(0.0);
        rb.total_cmp(&ra).then_with(|| a.cmp(b))
    });
    let score = ranking
        .iter()
        .map(|c| query_truth.relevance.get(c).copied().unwrap_or(0.0))
        .sum();
    Ok(PredictedRanking {
        query: query.to_string(),
        ranking,
        score,
    })
}
